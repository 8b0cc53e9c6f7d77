#pragma once

#include "semirigid/bench.hpp"
#include "semirigid/config.hpp"
#include "semirigid/constraints.hpp"
#include "semirigid/element.hpp"
#include "semirigid/error.hpp"
#include "semirigid/fuzzy.hpp"
#include "semirigid/loading.hpp"
#include "semirigid/model.hpp"
#include "semirigid/optimizer.hpp"
#include "semirigid/problem.hpp"
#include "semirigid/sections.hpp"
#include "semirigid/solver.hpp"
#include "semirigid/units.hpp"
