#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "semirigid/element.hpp"
#include "semirigid/error.hpp"
#include "semirigid/model.hpp"

namespace semirigid {

struct NodalLoad {
    std::size_t node = 0;
    double fx = 0.0; // N
    double fy = 0.0; // N
    double mz = 0.0; // N*m
};

/// Uniform gravity load on a member, N/m of member length, acting in global -y.
struct MemberLoad {
    std::size_t member = 0;
    double w = 0.0;
};

struct LoadCase {
    std::vector<NodalLoad> nodal;
    std::vector<MemberLoad> members;
    bool transient = false; // includes seismic action

    /// this + factor * other
    LoadCase& add(const LoadCase& other, double factor = 1.0) {
        for (auto n : other.nodal) nodal.push_back({n.node, factor * n.fx, factor * n.fy, factor * n.mz});
        for (auto m : other.members) members.push_back({m.member, factor * m.w});
        return *this;
    }

    LoadCase scaled(double factor) const { return LoadCase{}.add(*this, factor); }
};

struct AnalysisResult {
    std::vector<std::array<double, 3>> displacements; // per node: ux, uy, rz
    std::vector<Vector6> member_end_forces;           // local, per member
    std::vector<std::array<double, 2>> member_loads;  // local (wx, wy) per member, N/m
    std::vector<std::pair<std::size_t, std::array<double, 3>>> reactions;
    bool transient = false;
};

namespace detail {

inline std::array<double, 2> local_member_load(const Member& m, double w) {
    // global (0, -w) projected on local x = (c, s) and y = (-s, c)
    return {-w * m.sin, -w * m.cos};
}

/// In-place dense Cholesky, lower triangle. Returns the index of the first
/// non-positive pivot, or -1 on success.
inline long cholesky_in_place(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double original = a(j, j);
        double d = original;
        for (Eigen::Index k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 1e-12 * std::abs(original))) return static_cast<long>(j);
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    return -1;
}

inline void cholesky_solve(const Eigen::MatrixXd& l, Eigen::VectorXd& b) {
    const Eigen::Index n = l.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = b(i);
        for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * b(k);
        b(i) = s / l(i, i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = b(i);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= l(k, i) * b(k);
        b(i) = s / l(i, i);
    }
}

} // namespace detail

/// Assembled, factorized stiffness of one sized frame. Solving several load
/// cases reuses the factorization.
class FrameAnalysis {
public:
    explicit FrameAnalysis(const SizedFrame& sized, double E = units::steel_modulus) : sized_(sized) {
        const Frame& frame = sized.frame();
        const std::size_t ndof = 3 * frame.nodes().size();

        equation_.assign(ndof, -1);
        std::vector<bool> restrained(ndof, false);
        for (const auto& s : frame.supports()) {
            restrained[3 * s.node] = true;
            restrained[3 * s.node + 1] = true;
            if (s.fixity == Fixity::Fixed) restrained[3 * s.node + 2] = true;
        }
        long next = 0;
        for (std::size_t d = 0; d < ndof; ++d)
            if (!restrained[d]) {
                equation_[d] = next++;
                dof_of_equation_.push_back(d);
            }

        const auto& members = frame.members();
        local_.reserve(members.size());
        rotation_.reserve(members.size());
        factors_.reserve(members.size());

        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(next, next);
        for (const auto& m : members) {
            const Section& sec = sized.member_section(m);
            auto f = semirigid_factors(E, sec.moment_of_inertia_major, m.length, m.end_a, m.end_b);
            Matrix6 kl = local_stiffness(E, sec.area, sec.moment_of_inertia_major, m.length, f);
            Matrix6 t = rotation(m.cos, m.sin);
            Matrix6 kg = t.transpose() * kl * t;
            auto dofs = member_dofs(m);
            for (int i = 0; i < 6; ++i) {
                long ei = equation_[dofs[i]];
                if (ei < 0) continue;
                for (int j = 0; j < 6; ++j) {
                    long ej = equation_[dofs[j]];
                    if (ej >= 0) k(ei, ej) += kg(i, j);
                }
            }
            local_.push_back(kl);
            rotation_.push_back(t);
            factors_.push_back(f);
        }

        stiffness_ = k;
        long bad = detail::cholesky_in_place(k);
        if (bad >= 0) {
            std::size_t dof = dof_of_equation_[static_cast<std::size_t>(bad)];
            throw UnstableStructure(dof / 3, static_cast<int>(dof % 3), static_cast<std::size_t>(bad));
        }
        factor_ = std::move(k);
    }

    /// Reduced (free-DOF) stiffness before factorization.
    const Eigen::MatrixXd& reduced_stiffness() const noexcept { return stiffness_; }
    const SemiRigidFactors& factors(std::size_t member) const { return factors_[member]; }

    AnalysisResult solve(const LoadCase& load) const {
        const Frame& frame = sized_.frame();
        const auto& members = frame.members();
        const std::size_t nnode = frame.nodes().size();

        std::vector<double> nodal(3 * nnode, 0.0);
        for (const auto& p : load.nodal) {
            if (p.node >= nnode) throw ValidationError("nodal load references missing node");
            nodal[3 * p.node] += p.fx;
            nodal[3 * p.node + 1] += p.fy;
            nodal[3 * p.node + 2] += p.mz;
        }

        AnalysisResult out;
        out.transient = load.transient;
        out.member_loads.assign(members.size(), {0.0, 0.0});
        for (const auto& q : load.members) {
            if (q.member >= members.size()) throw ValidationError("member load references missing member");
            auto l = detail::local_member_load(members[q.member], q.w);
            out.member_loads[q.member][0] += l[0];
            out.member_loads[q.member][1] += l[1];
        }

        std::vector<Vector6> fixed(members.size(), Vector6::Zero());
        std::vector<double> rhs_full = nodal;
        for (const auto& m : members) {
            const auto& ml = out.member_loads[m.id];
            if (ml[0] == 0.0 && ml[1] == 0.0) continue;
            fixed[m.id] = fixed_end_forces(ml[0], ml[1], m.length, factors_[m.id]);
            Vector6 g = rotation_[m.id].transpose() * fixed[m.id];
            auto dofs = member_dofs(m);
            for (int i = 0; i < 6; ++i) rhs_full[dofs[i]] -= g(i);
        }

        Eigen::VectorXd u(static_cast<Eigen::Index>(dof_of_equation_.size()));
        for (std::size_t e = 0; e < dof_of_equation_.size(); ++e) u(static_cast<Eigen::Index>(e)) = rhs_full[dof_of_equation_[e]];
        detail::cholesky_solve(factor_, u);

        out.displacements.assign(nnode, {0.0, 0.0, 0.0});
        for (std::size_t e = 0; e < dof_of_equation_.size(); ++e) {
            std::size_t d = dof_of_equation_[e];
            out.displacements[d / 3][d % 3] = u(static_cast<Eigen::Index>(e));
        }

        std::vector<double> member_sum(3 * nnode, 0.0);
        out.member_end_forces.reserve(members.size());
        for (const auto& m : members) {
            auto dofs = member_dofs(m);
            Vector6 ug;
            for (int i = 0; i < 6; ++i) ug(i) = out.displacements[dofs[i] / 3][dofs[i] % 3];
            Vector6 f = local_[m.id] * (rotation_[m.id] * ug) + fixed[m.id];
            Vector6 fg = rotation_[m.id].transpose() * f;
            for (int i = 0; i < 6; ++i) member_sum[dofs[i]] += fg(i);
            out.member_end_forces.push_back(f);
        }

        for (const auto& s : frame.supports()) {
            std::array<double, 3> r{};
            for (int c = 0; c < 3; ++c) r[c] = member_sum[3 * s.node + c] - nodal[3 * s.node + c];
            if (s.fixity == Fixity::Pinned) r[2] = 0.0;
            out.reactions.emplace_back(s.node, r);
        }
        return out;
    }

private:
    static std::array<std::size_t, 6> member_dofs(const Member& m) {
        return {3 * m.node_a, 3 * m.node_a + 1, 3 * m.node_a + 2, 3 * m.node_b, 3 * m.node_b + 1, 3 * m.node_b + 2};
    }

    SizedFrame sized_;
    std::vector<long> equation_;
    std::vector<std::size_t> dof_of_equation_;
    std::vector<Matrix6> local_;
    std::vector<Matrix6> rotation_;
    std::vector<SemiRigidFactors> factors_;
    Eigen::MatrixXd stiffness_;
    Eigen::MatrixXd factor_;
};

inline AnalysisResult assemble_and_solve(const SizedFrame& sized, const LoadCase& load,
                                         double E = units::steel_modulus) {
    return FrameAnalysis(sized, E).solve(load);
}

inline std::vector<AnalysisResult> assemble_and_solve(const SizedFrame& sized, std::span<const LoadCase> loads,
                                                      double E = units::steel_modulus) {
    FrameAnalysis analysis(sized, E);
    std::vector<AnalysisResult> out;
    out.reserve(loads.size());
    for (const auto& l : loads) out.push_back(analysis.solve(l));
    return out;
}

} // namespace semirigid
