#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <catch_amalgamated.hpp>

#include "semirigid/cli.hpp"
#include "semirigid/semirigid.hpp"

namespace testing {

inline const semirigid::SectionCatalog& catalog() {
    static const auto c = semirigid::load_catalog_file(std::string(SEMIRIGID_TEST_DATA) + "/w_shapes.csv");
    return c;
}

template <class A, class B>
double max_rel(const A& a, const B& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return scale == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / scale;
}

inline semirigid::ProblemConfig frame3(semirigid::bench::ConnectionVariant v = semirigid::bench::ConnectionVariant::Rigid) {
    return semirigid::bench::benchmark(semirigid::bench::BenchmarkId::Frame3, v, catalog());
}

} // namespace testing
