#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "semirigid/error.hpp"

// Fuzzy satisfaction of the objective and constraints.
//
// Bilinear membership (objective): 1 up to F', linear to `mu_knee` at F'',
// linear to 0 at F_u, 0 beyond. The constraint version uses g_a, g_a + dg and
// g_u = n g_a as the three breakpoints. Linear membership drops straight from
// 1 to 0 between the first two breakpoints; crisp membership is a step at the
// allowable value.
namespace semirigid::fuzzy {

enum class Shape { Crisp, Linear, Bilinear };

inline Shape parse_shape(std::string_view s) {
    if (s == "crisp") return Shape::Crisp;
    if (s == "linear") return Shape::Linear;
    if (s == "bilinear") return Shape::Bilinear;
    throw ValidationError("unknown membership shape '" + std::string(s) + "' (expected crisp, linear, bilinear)");
}

inline std::string_view to_string(Shape s) {
    switch (s) {
    case Shape::Crisp: return "crisp";
    case Shape::Linear: return "linear";
    case Shape::Bilinear: return "bilinear";
    }
    return "?";
}

struct ObjectiveMembership {
    double f_lower = 0.0; // F'
    double f_upper = 1.0; // F''
    double f_max = 2.0;   // F_u
    double mu_knee = 0.5;
    Shape shape = Shape::Bilinear;

    void validate() const {
        if (!(f_lower < f_upper)) throw ValidationError(fmt::format("objective bounds need F' < F'' ({} vs {})", f_lower, f_upper));
        if (shape == Shape::Bilinear && !(f_upper < f_max))
            throw ValidationError(fmt::format("objective bounds need F'' < F_u ({} vs {})", f_upper, f_max));
        if (!(mu_knee > 0.0 && mu_knee < 1.0)) throw ValidationError("mu_knee must lie in (0, 1)");
    }
};

struct ConstraintMembership {
    double g_allow = 1.0;
    double delta_g = 0.05;
    double n_factor = 1.5;
    double mu_knee = 0.5;
    Shape shape = Shape::Bilinear;

    double g_upper() const noexcept { return n_factor * g_allow; }

    void validate() const {
        if (!(n_factor > 1.0)) throw ValidationError("n_factor must exceed 1");
        if (!(delta_g > 0.0 && delta_g < (n_factor - 1.0) * g_allow))
            throw ValidationError("delta_g must lie in (0, (n_factor - 1) g_allow)");
        if (!(mu_knee > 0.0 && mu_knee < 1.0)) throw ValidationError("mu_knee must lie in (0, 1)");
    }
};

namespace detail {

inline double two_segment(double x, double x0, double x1, double x2, double knee) {
    if (x <= x0) return 1.0;
    if (x <= x1) return 1.0 - (1.0 - knee) * (x - x0) / (x1 - x0);
    if (x < x2) return knee * (x2 - x) / (x2 - x1);
    return 0.0;
}

inline double one_segment(double x, double x0, double x1) {
    if (x <= x0) return 1.0;
    if (x < x1) return (x1 - x) / (x1 - x0);
    return 0.0;
}

} // namespace detail

inline double objective_membership(double F, const ObjectiveMembership& m) {
    switch (m.shape) {
    case Shape::Crisp: return F <= m.f_upper ? 1.0 : 0.0;
    case Shape::Linear: return detail::one_segment(F, m.f_lower, m.f_upper);
    case Shape::Bilinear: return detail::two_segment(F, m.f_lower, m.f_upper, m.f_max, m.mu_knee);
    }
    return 0.0;
}

inline double constraint_membership(double g, const ConstraintMembership& m) {
    const double knee_x = m.g_allow + m.delta_g;
    switch (m.shape) {
    case Shape::Crisp: return g <= m.g_allow ? 1.0 : 0.0;
    case Shape::Linear: return detail::one_segment(g, m.g_allow, knee_x);
    case Shape::Bilinear: return detail::two_segment(g, m.g_allow, knee_x, m.g_upper(), m.mu_knee);
    }
    return 0.0;
}

/// lambda = min(mu_F, min_i mu_g_i).
inline double aggregate_lambda(double mu_f, std::span<const double> mu_g) {
    double lambda = mu_f;
    for (double m : mu_g) lambda = std::min(lambda, m);
    return lambda;
}

/// Multipliers of the penalized satisfaction objective. `gamma`/`omega` hold
/// either one value applied to every constraint or one value per constraint
/// in the order stress, displacement, auxiliary.
struct PenaltyConfig {
    double s_f = 10.0;
    double alpha = 1.0;
    double beta = 0.0;
    std::vector<double> gamma{1.0};
    std::vector<double> omega{0.0};

    void validate() const {
        if (!(s_f > 0.0)) throw ValidationError("penalty scale s_f must be positive");
        if (gamma.empty() || omega.empty()) throw ValidationError("penalty gamma/omega must not be empty");
        for (double g : gamma)
            if (!(g >= 0.0)) throw ValidationError("penalty gamma must be non-negative");
    }
};

/// Memberships are floored here before dividing.
inline constexpr double membership_floor = 1e-6;

/// phi = -S_f lambda + 1/2 alpha (lambda/mu_F - 1 + beta)^2
///       + 1/2 sum_i gamma_i (lambda/mu_i - 1 + omega_i)^2
/// over the stress, displacement and auxiliary memberships.
inline double penalized_phi(double lambda, double mu_f, std::span<const double> mu_stress,
                            std::span<const double> mu_disp, std::span<const double> mu_aux, const PenaltyConfig& cfg) {
    auto guard = [](double mu) { return std::max(mu, membership_floor); };
    auto term = [&](double mu, double mult, double shift) {
        double r = lambda / guard(mu) - 1.0 + shift;
        return 0.5 * mult * r * r;
    };
    auto pick = [](const std::vector<double>& v, std::size_t i) { return v.size() == 1 ? v[0] : v.at(i); };

    double phi = -cfg.s_f * lambda + term(mu_f, cfg.alpha, cfg.beta);
    std::size_t i = 0;
    for (auto list : {mu_stress, mu_disp, mu_aux})
        for (double mu : list) {
            phi += term(mu, pick(cfg.gamma, i), pick(cfg.omega, i));
            ++i;
        }
    return phi;
}

enum class FitnessMode { Lambda, Phi };

inline FitnessMode parse_fitness_mode(std::string_view s) {
    if (s == "lambda") return FitnessMode::Lambda;
    if (s == "phi") return FitnessMode::Phi;
    throw ValidationError("unknown fitness mode '" + std::string(s) + "' (expected lambda, phi)");
}

inline std::string_view to_string(FitnessMode m) { return m == FitnessMode::Lambda ? "lambda" : "phi"; }

/// Memberships of one evaluated design.
struct Memberships {
    double objective = 0.0;
    std::vector<double> stress;
    std::vector<double> displacement;
    std::vector<double> aux;

    double lambda() const {
        double l = objective;
        for (const auto* list : {&stress, &displacement, &aux}) l = aggregate_lambda(l, *list);
        return l;
    }
};

/// Larger is better in both modes: lambda, or -phi.
inline double fitness(const Memberships& mu, FitnessMode mode, const PenaltyConfig& penalty = {}) {
    const double lambda = mu.lambda();
    if (mode == FitnessMode::Lambda) return lambda;
    return -penalized_phi(lambda, mu.objective, mu.stress, mu.displacement, mu.aux, penalty);
}

} // namespace semirigid::fuzzy
