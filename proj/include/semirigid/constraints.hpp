#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "semirigid/model.hpp"
#include "semirigid/solver.hpp"

namespace semirigid {

enum class BucklingAxis { Minor, Major };

struct DesignLimits {
    double drift_denominator = 300.0; // roof drift limit = H / drift_denominator
    double fy = 2.4e8;                // Pa
    BucklingAxis column_axis = BucklingAxis::Minor;
    double transient_increase = 4.0 / 3.0; // allowable stress multiplier for seismic combinations
};

/// Demand/allowable ratios. Every allowable is normalized to 1.
struct ConstraintReport {
    std::vector<double> stress_ratios; // per member
    double drift_ratio = 0.0;
    std::vector<double> aux_ratios;    // column continuity
    double worst = 0.0;

    bool feasible() const noexcept { return worst <= 1.0; }
};

/// Allowable axial compression stress for slenderness kl_r (ASD column curve).
inline double allowable_compression(double kl_r, double E, double fy) {
    const double cc = std::sqrt(2.0 * std::numbers::pi * std::numbers::pi * E / fy);
    if (kl_r <= cc) {
        const double r = kl_r / cc;
        const double fs = 5.0 / 3.0 + 3.0 / 8.0 * r - r * r * r / 8.0;
        return (1.0 - r * r / 2.0) * fy / fs;
    }
    return 12.0 * std::numbers::pi * std::numbers::pi * E / (23.0 * kl_r * kl_r);
}

/// Largest |bending moment| along a member from its local end forces and
/// uniform transverse load wy.
inline double max_moment(const Vector6& end_forces, double wy, double L) {
    const double m1 = end_forces(2);
    const double v1 = end_forces(1);
    auto moment = [&](double x) { return -m1 + v1 * x + 0.5 * wy * x * x; };
    double m = std::max(std::abs(moment(0.0)), std::abs(end_forces(5)));
    if (wy != 0.0) {
        const double x = -v1 / wy;
        if (x > 0.0 && x < L) m = std::max(m, std::abs(moment(x)));
    }
    return m;
}

/// f_a/F_a + f_b/F_b with F_b = 0.66 Fy and F_t = 0.6 Fy in tension.
/// `radius` is the radius of gyration governing axial buckling (K = 1).
inline double stress_ratio(const Vector6& end_forces, double wy, const Section& section, double E, double L,
                           double radius, double fy = 2.4e8) {
    const double n1 = end_forces(0);
    const double n2 = end_forces(3);
    const double axial = std::max(std::abs(n1), std::abs(n2));
    const bool compression = n1 > 0.0 || (n1 == 0.0 && n2 < 0.0);
    const double fa = axial / section.area;
    const double allow_a = compression ? allowable_compression(L / radius, E, fy) : 0.6 * fy;
    const double fb = max_moment(end_forces, wy, L) / section.section_modulus_major;
    return fa / allow_a + fb / (0.66 * fy);
}

/// Beams are braced out of plane by the floor, so their in-plane radius
/// sqrt(Ix/A) governs. Columns use the configured axis (weak axis by default).
inline double buckling_radius(const Member& m, const Section& s, BucklingAxis column_axis = BucklingAxis::Minor) {
    if (m.role == MemberRole::Column && column_axis == BucklingAxis::Minor) return s.radius_of_gyration_minor;
    return std::sqrt(s.moment_of_inertia_major / s.area);
}

/// Largest |ux| among the nodes on the top level.
inline double roof_displacement(const AnalysisResult& result, const Frame& frame) {
    const double top = frame.base_level() + frame.height();
    double d = 0.0;
    for (const auto& n : frame.nodes())
        if (std::abs(n.y - top) <= Frame::level_tolerance) d = std::max(d, std::abs(result.displacements[n.id][0]));
    return d;
}

inline double drift_ratio(const AnalysisResult& result, const Frame& frame, double drift_denominator = 300.0) {
    return roof_displacement(result, frame) / (frame.height() / drift_denominator);
}

/// Distinct (upper group, lower group) pairs of differently-grouped columns
/// stacked on the same node.
inline std::vector<std::pair<std::size_t, std::size_t>> column_stack_pairs(const Frame& frame) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& lower : frame.members()) {
        if (lower.role != MemberRole::Column) continue;
        const auto lower_top = frame.nodes()[lower.node_a].y > frame.nodes()[lower.node_b].y ? lower.node_a : lower.node_b;
        for (const auto& upper : frame.members()) {
            if (upper.role != MemberRole::Column || upper.id == lower.id || upper.group == lower.group) continue;
            const auto upper_bottom =
                frame.nodes()[upper.node_a].y < frame.nodes()[upper.node_b].y ? upper.node_a : upper.node_b;
            if (upper_bottom != lower_top) continue;
            std::pair<std::size_t, std::size_t> p{upper.group, lower.group};
            if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
        }
    }
    return pairs;
}

/// Column-continuity ratios area(upper group) / area(lower group), one per
/// stacked group pair.
inline std::vector<double> constructability_ratios(const SizedFrame& sized) {
    std::vector<double> out;
    for (auto [u, l] : column_stack_pairs(sized.frame()))
        out.push_back(sized.group_section(u).area / sized.group_section(l).area);
    return out;
}

/// Worst-case report over all analyzed load combinations.
inline ConstraintReport evaluate_constraints(const SizedFrame& sized, std::span<const AnalysisResult> results,
                                             const DesignLimits& limits, double E = units::steel_modulus) {
    const Frame& frame = sized.frame();
    ConstraintReport rep;
    rep.stress_ratios.assign(frame.members().size(), 0.0);
    for (const auto& r : results) {
        for (const auto& m : frame.members()) {
            const Section& s = sized.member_section(m);
            double ratio = stress_ratio(r.member_end_forces[m.id], r.member_loads[m.id][1], s, E, m.length,
                                        buckling_radius(m, s, limits.column_axis), limits.fy);
            if (r.transient) ratio /= limits.transient_increase;
            rep.stress_ratios[m.id] = std::max(rep.stress_ratios[m.id], ratio);
        }
        rep.drift_ratio = std::max(rep.drift_ratio, drift_ratio(r, frame, limits.drift_denominator));
    }
    rep.aux_ratios = constructability_ratios(sized);

    rep.worst = rep.drift_ratio;
    for (double v : rep.stress_ratios) rep.worst = std::max(rep.worst, v);
    for (double v : rep.aux_ratios) rep.worst = std::max(rep.worst, v);
    return rep;
}

} // namespace semirigid
