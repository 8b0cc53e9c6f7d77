#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "semirigid/constraints.hpp"
#include "semirigid/fuzzy.hpp"
#include "semirigid/loading.hpp"
#include "semirigid/model.hpp"
#include "semirigid/solver.hpp"

namespace semirigid {

/// User-facing fuzzy settings. Unset objective bounds are resolved per run
/// (see resolve_scheme in optimizer.hpp).
struct FuzzyConfig {
    fuzzy::Shape shape = fuzzy::Shape::Bilinear;
    double mu_knee = 0.5;
    std::optional<double> f_lower; // N
    std::optional<double> f_upper; // N
    std::optional<double> f_max;   // N
    double n_factor = 1.5;
    double delta_g = 0.05;
    fuzzy::PenaltyConfig penalty;
    fuzzy::FitnessMode mode = fuzzy::FitnessMode::Lambda;
    std::size_t pilot_generations = 10;
    bool seed_from_pilot = true; // pilot's best design joins each initial population
    double lower_fraction = 0.6; // F' = lower_fraction * F''
    double upper_factor = 1.5;   // F_u = upper_factor * F''
};

/// Fully resolved memberships used to score designs during one run.
struct FitnessScheme {
    fuzzy::ObjectiveMembership objective;
    fuzzy::ConstraintMembership constraint;
    fuzzy::FitnessMode mode = fuzzy::FitnessMode::Lambda;
    fuzzy::PenaltyConfig penalty;
};

/// Everything needed to score one design.
struct FitnessRecord {
    Assignment assignment;
    double weight = 0.0;       // N
    double lambda = 0.0;
    double fitness = 0.0;
    double worst = 0.0;        // worst constraint ratio; +inf when unstable
    double roof_displacement = 0.0; // m, largest over combinations
    bool unstable = false;

    bool feasible() const noexcept { return !unstable && worst <= 1.0; }

    friend bool operator==(const FitnessRecord&, const FitnessRecord&) = default;
};

/// Crisp analysis outcome of one design.
struct DesignAnalysis {
    double weight = 0.0;
    bool unstable = false;
    ConstraintReport report;
    double roof_displacement = 0.0;
    std::vector<AnalysisResult> results;
};

class Problem {
public:
    Problem(std::shared_ptr<const Frame> frame, GravitySpec gravity, SeismicSpec seismic, DesignLimits limits = {},
            CombinationFactors factors = {}, bool seismic_includes_live = false,
            double modulus = units::steel_modulus, double unit_weight = units::steel_unit_weight)
        : frame_(std::move(frame)), gravity_(gravity), seismic_(seismic), limits_(limits), factors_(factors),
          modulus_(modulus), unit_weight_(unit_weight),
          seismic_model_(*frame_, gravity, seismic, seismic_includes_live, unit_weight),
          gravity_case_(gravity_line_loads(gravity, *frame_)) {}

    const Frame& frame() const noexcept { return *frame_; }
    std::shared_ptr<const Frame> frame_ptr() const noexcept { return frame_; }
    const GravitySpec& gravity() const noexcept { return gravity_; }
    const SeismicSpec& seismic() const noexcept { return seismic_; }
    const DesignLimits& limits() const noexcept { return limits_; }
    const CombinationFactors& combination_factors() const noexcept { return factors_; }
    double modulus() const noexcept { return modulus_; }
    double unit_weight() const noexcept { return unit_weight_; }
    const SeismicLoadModel& seismic_model() const noexcept { return seismic_model_; }

    std::vector<LoadCase> load_cases(const SizedFrame& sized) const {
        return combinations(gravity_case_, seismic_model_.load_case(sized), factors_);
    }

    DesignAnalysis analyze(const Assignment& assignment, bool keep_results = false) const {
        auto sized = apply_design(*frame_, assignment);
        DesignAnalysis out;
        out.weight = frame_weight(sized, unit_weight_);
        try {
            auto cases = load_cases(sized);
            auto results = assemble_and_solve(sized, cases, modulus_);
            out.report = evaluate_constraints(sized, results, limits_, modulus_);
            for (const auto& r : results) out.roof_displacement = std::max(out.roof_displacement, roof_displacement(r, *frame_));
            if (keep_results) out.results = std::move(results);
        } catch (const UnstableStructure&) {
            out.unstable = true;
            out.report.worst = std::numeric_limits<double>::infinity();
        }
        return out;
    }

    /// Lightest and heaviest possible designs (lightest/heaviest section in every pool).
    std::pair<double, double> weight_range() const {
        Assignment lo(frame_->groups().size()), hi(frame_->groups().size());
        for (const auto& g : frame_->groups()) {
            auto cmp = [](const Section& a, const Section& b) { return a.area < b.area; };
            lo[g.id] = static_cast<std::size_t>(std::min_element(g.pool.begin(), g.pool.end(), cmp) - g.pool.begin());
            hi[g.id] = static_cast<std::size_t>(std::max_element(g.pool.begin(), g.pool.end(), cmp) - g.pool.begin());
        }
        return {frame_weight(SizedFrame(*frame_, lo), unit_weight_), frame_weight(SizedFrame(*frame_, hi), unit_weight_)};
    }

private:
    std::shared_ptr<const Frame> frame_;
    GravitySpec gravity_;
    SeismicSpec seismic_;
    DesignLimits limits_;
    CombinationFactors factors_;
    double modulus_;
    double unit_weight_;
    SeismicLoadModel seismic_model_;
    LoadCase gravity_case_;
};

inline fuzzy::Memberships memberships(const DesignAnalysis& a, const FitnessScheme& scheme) {
    fuzzy::Memberships mu;
    mu.objective = fuzzy::objective_membership(a.weight, scheme.objective);
    for (double r : a.report.stress_ratios) mu.stress.push_back(fuzzy::constraint_membership(r, scheme.constraint));
    mu.displacement.push_back(fuzzy::constraint_membership(a.report.drift_ratio, scheme.constraint));
    for (double r : a.report.aux_ratios) mu.aux.push_back(fuzzy::constraint_membership(r, scheme.constraint));
    return mu;
}

/// decode -> size -> load -> solve -> constraints -> memberships -> fitness.
/// An unstable design scores as fully violated.
inline FitnessRecord evaluate(const Assignment& assignment, const Problem& problem, const FitnessScheme& scheme) {
    auto a = problem.analyze(assignment);
    FitnessRecord rec;
    rec.assignment = assignment;
    rec.weight = a.weight;
    rec.worst = a.report.worst;
    rec.roof_displacement = a.roof_displacement;
    rec.unstable = a.unstable;
    if (a.unstable) {
        fuzzy::Memberships mu;
        mu.objective = fuzzy::objective_membership(a.weight, scheme.objective);
        mu.stress.assign(problem.frame().members().size(), 0.0);
        mu.displacement.assign(1, 0.0);
        rec.lambda = 0.0;
        rec.fitness = fuzzy::fitness(mu, scheme.mode, scheme.penalty);
        return rec;
    }
    auto mu = memberships(a, scheme);
    rec.lambda = mu.lambda();
    rec.fitness = fuzzy::fitness(mu, scheme.mode, scheme.penalty);
    return rec;
}

} // namespace semirigid
