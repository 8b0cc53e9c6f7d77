#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "semirigid/error.hpp"
#include "semirigid/model.hpp"
#include "semirigid/solver.hpp"

namespace semirigid {

/// Area loads, N/m^2, converted to beam line loads through the tributary width.
struct GravitySpec {
    double dead = 5886.0;
    double live = 1962.0;
    double roof_live = 1471.5;
    double tributary_width = 5.0;

    void validate() const {
        if (!(dead >= 0.0) || !(live >= 0.0) || !(roof_live >= 0.0) || !(tributary_width >= 0.0))
            throw ValidationError("gravity loads and tributary width must be non-negative");
    }
};

/// UBC-97 static lateral force parameters.
struct SeismicSpec {
    double A = 0.3; // peak ground acceleration factor
    double B = 2.5; // spectral response factor
    double I = 1.0; // importance factor
    double R = 8.0; // response modification factor

    double coefficient() const { return A * B * I / R; }

    void validate() const {
        if (!(A >= 0.0) || !(B > 0.0) || !(I > 0.0) || !(R > 0.0))
            throw ValidationError("seismic factors must be positive (A may be zero)");
        if (coefficient() > 1.0) throw ValidationError(fmt::format("seismic coefficient {} exceeds 1", coefficient()));
    }
};

/// Beams on the highest level take the roof live load.
inline LoadCase gravity_line_loads(const GravitySpec& spec, const Frame& frame) {
    LoadCase lc;
    const double top = frame.base_level() + frame.height();
    for (const auto& m : frame.members()) {
        if (m.role != MemberRole::Beam) continue;
        const double y = 0.5 * (frame.nodes()[m.node_a].y + frame.nodes()[m.node_b].y);
        const bool roof = std::abs(y - top) <= Frame::level_tolerance;
        const double w = (spec.dead + (roof ? spec.roof_live : spec.live)) * spec.tributary_width;
        lc.members.push_back({m.id, w});
    }
    return lc;
}

/// V = C W with C = A B I / R.
inline double ubc_base_shear(double effective_weight, const SeismicSpec& spec) {
    return spec.coefficient() * effective_weight;
}

/// F_x = V w_x h_x / sum(w h); the top story takes the rounding remainder so
/// the forces sum to V.
inline std::vector<double> distribute_story_forces(double V, std::span<const double> weights,
                                                   std::span<const double> heights) {
    if (weights.size() != heights.size())
        throw ValidationError(fmt::format("story weights ({}) and heights ({}) differ in length", weights.size(),
                                          heights.size()));
    if (weights.empty()) return {};
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) sum += weights[i] * heights[i];
    if (!(sum > 0.0)) throw ValidationError("sum of story weight times height must be positive");
    std::vector<double> f(weights.size());
    double assigned = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        f[i] = V * weights[i] * heights[i] / sum;
        assigned += f[i];
    }
    f.back() = V - assigned;
    return f;
}

struct CombinationFactors {
    double gravity = 1.0;
    double seismic = 1.0;
};

/// {gravity, gravity + seismic(+x), gravity + seismic(-x)}
inline std::vector<LoadCase> combinations(const LoadCase& gravity, const LoadCase& seismic,
                                          const CombinationFactors& factors = {}) {
    std::vector<LoadCase> out;
    out.push_back(gravity.scaled(factors.gravity));
    out.push_back(gravity.scaled(factors.gravity).add(seismic, factors.seismic));
    out.push_back(gravity.scaled(factors.gravity).add(seismic, -factors.seismic));
    out[1].transient = out[2].transient = true;
    return out;
}

/// Design-dependent lateral load for one frame. Geometry-only bookkeeping is
/// done once; load_case() only adds the current steel weight.
///
/// Effective weight of a floor = floor dead load (+ live if requested)
/// + weight of its beams + weight of the columns of the story below it.
class SeismicLoadModel {
public:
    SeismicLoadModel(const Frame& frame, const GravitySpec& gravity, const SeismicSpec& seismic,
                     bool include_live = false, double unit_weight = units::steel_unit_weight)
        : seismic_(seismic), unit_weight_(unit_weight) {
        gravity.validate();
        seismic.validate();
        const auto levels = frame.floor_levels();
        const double base = frame.base_level();
        heights_.resize(levels.size());
        floor_load_.assign(levels.size(), 0.0);
        leftmost_.assign(levels.size(), 0);
        for (std::size_t i = 0; i < levels.size(); ++i) heights_[i] = levels[i] - base;

        std::vector<double> leftmost_x(levels.size(), std::numeric_limits<double>::infinity());
        for (const auto& n : frame.nodes()) {
            auto f = frame.floor_of(n.y);
            if (f && n.x < leftmost_x[*f]) {
                leftmost_x[*f] = n.x;
                leftmost_[*f] = n.id;
            }
        }

        member_floor_.assign(frame.members().size(), levels.size());
        for (const auto& m : frame.members()) {
            const auto& a = frame.nodes()[m.node_a];
            const auto& b = frame.nodes()[m.node_b];
            auto f = frame.floor_of(std::max(a.y, b.y));
            if (!f) continue;
            member_floor_[m.id] = *f;
            if (m.role == MemberRole::Beam) {
                const bool roof = *f + 1 == levels.size();
                double area_load = gravity.dead + (include_live ? (roof ? gravity.roof_live : gravity.live) : 0.0);
                floor_load_[*f] += area_load * gravity.tributary_width * m.length;
            }
        }
    }

    std::size_t floors() const noexcept { return heights_.size(); }
    const std::vector<double>& story_heights() const noexcept { return heights_; }

    std::vector<double> story_weights(const SizedFrame& sized) const {
        std::vector<double> w = floor_load_;
        for (const auto& m : sized.frame().members()) {
            auto f = member_floor_[m.id];
            if (f < w.size()) w[f] += sized.member_section(m).area * m.length * unit_weight_;
        }
        return w;
    }

    double effective_weight(const SizedFrame& sized) const {
        auto w = story_weights(sized);
        return std::accumulate(w.begin(), w.end(), 0.0);
    }

    /// Story forces in +x at the leftmost node of each floor.
    LoadCase load_case(const SizedFrame& sized) const {
        auto w = story_weights(sized);
        double V = ubc_base_shear(std::accumulate(w.begin(), w.end(), 0.0), seismic_);
        auto forces = distribute_story_forces(V, w, heights_);
        LoadCase lc;
        for (std::size_t i = 0; i < forces.size(); ++i) lc.nodal.push_back({leftmost_[i], forces[i], 0.0, 0.0});
        return lc;
    }

private:
    SeismicSpec seismic_;
    double unit_weight_;
    std::vector<double> heights_;
    std::vector<double> floor_load_;
    std::vector<std::size_t> leftmost_;
    std::vector<std::size_t> member_floor_;
};

} // namespace semirigid
