#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "semirigid/model.hpp"
#include "semirigid/sections.hpp"

// Plane frame element with rotational springs at both ends.
//
// Local DOF order: (u1, v1, rz1, u2, v2, rz2); x runs from end A to end B,
// y is x rotated +90 degrees, moments are positive counterclockwise.
// End forces are the forces the nodes exert on the member.
namespace semirigid {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Connection flexibility relative to the member: alpha = EI / (L K).
/// Rigid ends have alpha = 0, pinned ends alpha = +inf.
struct SemiRigidFactors {
    double alpha_a = 0.0;
    double alpha_b = 0.0;

    bool pinned_a() const noexcept { return std::isinf(alpha_a); }
    bool pinned_b() const noexcept { return std::isinf(alpha_b); }

    /// 1 + 4 aA + 4 aB + 12 aA aB (infinite when either end is pinned).
    double denominator() const noexcept { return 1.0 + 4.0 * alpha_a + 4.0 * alpha_b + 12.0 * alpha_a * alpha_b; }
};

inline double fixity_alpha(double E, double I, double L, const ConnectionModel& conn) {
    switch (conn.kind) {
    case ConnectionKind::Rigid: return 0.0;
    case ConnectionKind::Pinned: return std::numeric_limits<double>::infinity();
    case ConnectionKind::SemiRigid: return E * I / (L * conn.k_rot);
    }
    return 0.0;
}

inline SemiRigidFactors semirigid_factors(double E, double I, double L, const ConnectionModel& end_a,
                                          const ConnectionModel& end_b) {
    return {fixity_alpha(E, I, L, end_a), fixity_alpha(E, I, L, end_b)};
}

/// End-moment stiffnesses relating (rz1 - chord, rz2 - chord) to (M1, M2).
struct RotationalStiffness {
    double r11 = 0.0;
    double r12 = 0.0;
    double r22 = 0.0;
};

inline RotationalStiffness rotational_stiffness(double E, double I, double L, const SemiRigidFactors& f) {
    const double c = E * I / L;
    if (f.pinned_a() && f.pinned_b()) return {};
    if (f.pinned_a()) return {0.0, 0.0, 3.0 * c / (1.0 + 3.0 * f.alpha_b)};
    if (f.pinned_b()) return {3.0 * c / (1.0 + 3.0 * f.alpha_a), 0.0, 0.0};
    const double d = f.denominator();
    return {4.0 * c * (1.0 + 3.0 * f.alpha_b) / d, 2.0 * c / d, 4.0 * c * (1.0 + 3.0 * f.alpha_a) / d};
}

/// Closed-form local stiffness of the spring-ended member.
inline Matrix6 local_stiffness(double E, double A, double I, double L, const SemiRigidFactors& f) {
    const auto [r11, r12, r22] = rotational_stiffness(E, I, L, f);
    const double ea = E * A / L;
    const double kvv = (r11 + 2.0 * r12 + r22) / (L * L);
    const double kv1 = (r11 + r12) / L;
    const double kv2 = (r12 + r22) / L;

    Matrix6 k;
    // clang-format off
    k <<  ea,   0.0,  0.0, -ea,   0.0,  0.0,
          0.0,  kvv,  kv1,  0.0, -kvv,  kv2,
          0.0,  kv1,  r11,  0.0, -kv1,  r12,
         -ea,   0.0,  0.0,  ea,   0.0,  0.0,
          0.0, -kvv, -kv1,  0.0,  kvv, -kv2,
          0.0,  kv2,  r12,  0.0, -kv2,  r22;
    // clang-format on
    return k;
}

/// Global-to-local rotation for direction cosines (c, s).
inline Matrix6 rotation(double c, double s) {
    Matrix6 t = Matrix6::Zero();
    for (int n = 0; n < 2; ++n) {
        const int o = 3 * n;
        t(o, o) = c;
        t(o, o + 1) = s;
        t(o + 1, o) = -s;
        t(o + 1, o + 1) = c;
        t(o + 2, o + 2) = 1.0;
    }
    return t;
}

/// Element stiffness in global coordinates.
inline Matrix6 element_stiffness(const Section& section, double E, double L, const SemiRigidFactors& f, double c,
                                 double s) {
    const Matrix6 t = rotation(c, s);
    return t.transpose() * local_stiffness(E, section.area, section.moment_of_inertia_major, L, f) * t;
}

inline Matrix6 element_stiffness(const Section& section, double E, double L, const SemiRigidFactors& f,
                                 double angle) {
    return element_stiffness(section, E, L, f, std::cos(angle), std::sin(angle));
}

/// Fixed-end forces for uniform load (wx axial, wy transverse, N/m, local axes).
///
/// The clamped-clamped moments M_A = -wy L^2/12, M_B = +wy L^2/12 are
/// redistributed for the end springs as
///   M_A' = (M_A - 6 aB M_B) / D,   M_B' = (M_B - 6 aA M_A) / D,
/// and the shears follow from member equilibrium.
inline Vector6 fixed_end_forces(double wx, double wy, double L, const SemiRigidFactors& f) {
    const double m0a = -wy * L * L / 12.0;
    const double m0b = wy * L * L / 12.0;
    double ma = 0.0;
    double mb = 0.0;
    if (f.pinned_a() && f.pinned_b()) {
        // simply supported
    } else if (f.pinned_a()) {
        mb = (m0b - 0.5 * m0a) / (1.0 + 3.0 * f.alpha_b);
    } else if (f.pinned_b()) {
        ma = (m0a - 0.5 * m0b) / (1.0 + 3.0 * f.alpha_a);
    } else {
        const double d = f.denominator();
        ma = (m0a - 6.0 * f.alpha_b * m0b) / d;
        mb = (m0b - 6.0 * f.alpha_a * m0a) / d;
    }
    Vector6 r;
    r << -wx * L / 2.0, (ma + mb) / L - wy * L / 2.0, ma, -wx * L / 2.0, -(ma + mb) / L - wy * L / 2.0, mb;
    return r;
}

inline Vector6 fixed_end_forces(double wy, double L, const SemiRigidFactors& f) {
    return fixed_end_forces(0.0, wy, L, f);
}

namespace detail {

// Rigid element on (u1, v1, phi1, u2, v2, phi2) embedded in the 8-DOF
// spring system (u1, v1, rz1, u2, v2, rz2, phi1, phi2).
inline Eigen::Matrix<double, 8, 8> spring_system(double E, double A, double I, double L, double k_a, double k_b) {
    const Matrix6 rigid = local_stiffness(E, A, I, L, SemiRigidFactors{});
    constexpr int map[6] = {0, 1, 6, 3, 4, 7};
    Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) k(map[i], map[j]) += rigid(i, j);
    k(2, 2) += k_a;
    k(6, 6) += k_a;
    k(2, 6) -= k_a;
    k(6, 2) -= k_a;
    k(5, 5) += k_b;
    k(7, 7) += k_b;
    k(5, 7) -= k_b;
    k(7, 5) -= k_b;
    return k;
}

} // namespace detail

/// Reference element: explicit end springs (k_a, k_b in N*m/rad, >= 0)
/// statically condensed onto the node DOFs. Independent of the closed form.
inline Matrix6 condensation_oracle(double E, double A, double I, double L, double k_a, double k_b) {
    const auto k = detail::spring_system(E, A, I, L, k_a, k_b);
    const Matrix6 kee = k.topLeftCorner<6, 6>();
    const Eigen::Matrix<double, 6, 2> kei = k.topRightCorner<6, 2>();
    const Eigen::Matrix2d kii = k.bottomRightCorner<2, 2>();
    return kee - kei * kii.ldlt().solve(kei.transpose());
}

inline Matrix6 condensation_oracle(const Section& s, double E, double L, double k_a, double k_b) {
    return condensation_oracle(E, s.area, s.moment_of_inertia_major, L, k_a, k_b);
}

/// Fixed-end forces of the condensed spring system under uniform load.
inline Vector6 condensation_oracle_fixed_end_forces(double E, double A, double I, double L, double k_a, double k_b,
                                                    double wx, double wy) {
    const auto k = detail::spring_system(E, A, I, L, k_a, k_b);
    // clamped-clamped beam-end forces, placed on the internal rotations
    Eigen::Matrix<double, 8, 1> r = Eigen::Matrix<double, 8, 1>::Zero();
    r(0) = -wx * L / 2.0;
    r(3) = -wx * L / 2.0;
    r(1) = -wy * L / 2.0;
    r(4) = -wy * L / 2.0;
    r(6) = -wy * L * L / 12.0;
    r(7) = wy * L * L / 12.0;
    const Eigen::Matrix<double, 6, 2> kei = k.topRightCorner<6, 2>();
    const Eigen::Matrix2d kii = k.bottomRightCorner<2, 2>();
    return r.head<6>() - kei * kii.ldlt().solve(r.tail<2>());
}

} // namespace semirigid
