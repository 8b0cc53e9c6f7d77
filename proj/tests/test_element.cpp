#include "support.hpp"

#include <random>

using namespace semirigid;
using Catch::Approx;

namespace {

// Flexibility-method element: basic forces (N, MA, MB) against basic
// deformations (elongation, end rotations relative to the chord), springs in
// series with the beam's own flexibility, then mapped to the six end DOFs.
Matrix6 flexibility_element(double E, double A, double I, double L, double ka, double kb) {
    Eigen::Matrix2d f;
    f << 2.0, -1.0, -1.0, 2.0;
    f *= L / (6.0 * E * I);
    if (ka > 0.0) f(0, 0) += 1.0 / ka;
    if (kb > 0.0) f(1, 1) += 1.0 / kb;
    Eigen::Matrix3d kb3 = Eigen::Matrix3d::Zero();
    kb3(0, 0) = E * A / L;
    kb3.bottomRightCorner<2, 2>() = f.inverse();
    Eigen::Matrix<double, 3, 6> b;
    // clang-format off
    b << -1.0, 0.0,     0.0, 1.0, 0.0,      0.0,
          0.0, 1.0 / L, 1.0, 0.0, -1.0 / L, 0.0,
          0.0, 1.0 / L, 0.0, 0.0, -1.0 / L, 1.0;
    // clang-format on
    return b.transpose() * kb3 * b;
}

// Clamped spring-ended beam under uniform local load: spring + beam rotations
// must cancel the simply supported end slopes.
Vector6 flexibility_fixed_end(double E, double I, double L, double ka, double kb, double wx, double wy) {
    Eigen::Matrix2d f;
    f << 2.0, -1.0, -1.0, 2.0;
    f *= L / (6.0 * E * I);
    f(0, 0) += 1.0 / ka;
    f(1, 1) += 1.0 / kb;
    Eigen::Vector2d slope(wy * L * L * L / (24.0 * E * I), -wy * L * L * L / (24.0 * E * I));
    Eigen::Vector2d m = -f.inverse() * slope;
    Vector6 r;
    const double va = (m(0) + m(1)) / L - wy * L / 2.0;
    r << -wx * L / 2.0, va, m(0), -wx * L / 2.0, -wy * L - va, m(1);
    return r;
}

Matrix6 rigid_textbook(double E, double A, double I, double L) {
    const double a = E * A / L, b = 12 * E * I / (L * L * L), c = 6 * E * I / (L * L), d = 4 * E * I / L,
                 e = 2 * E * I / L;
    Matrix6 k;
    // clang-format off
    k <<  a,  0,  0, -a,  0,  0,
          0,  b,  c,  0, -b,  c,
          0,  c,  d,  0, -c,  e,
         -a,  0,  0,  a,  0,  0,
          0, -b, -c,  0,  b, -c,
          0,  c,  e,  0, -c,  d;
    // clang-format on
    return k;
}

// 6x6 permutation that swaps the two ends and reverses the local x axis.
Matrix6 end_swap() {
    Matrix6 p = Matrix6::Zero();
    p(0, 3) = -1;
    p(1, 4) = -1;
    p(2, 5) = 1;
    p(3, 0) = -1;
    p(4, 1) = -1;
    p(5, 2) = 1;
    return p;
}

} // namespace

TEST_CASE("fixity factor by hand", "[element]") {
    const double I = 75.3 * std::pow(0.0254, 4);
    auto f = semirigid_factors(2.059e11, I, 5.0, ConnectionModel::semi_rigid(8.33e7), ConnectionModel::rigid());
    // 75.3 in^4 = 3.134220e-5 m^4; 2.059e11 * 3.134220e-5 / (5 * 8.33e7) = 0.0154943
    CHECK(f.alpha_a == Approx(0.0154943).epsilon(1e-5));
    CHECK(f.alpha_b == 0.0);

    auto r = semirigid_factors(2.059e11, I, 5.0, ConnectionModel::rigid(), ConnectionModel::rigid());
    CHECK(r.alpha_a == 0.0);
    CHECK(r.denominator() == 1.0);

    auto stiff = semirigid_factors(2.059e11, I, 5.0, ConnectionModel::semi_rigid(1e20), ConnectionModel::semi_rigid(1e20));
    CHECK(stiff.alpha_a < 1e-12);

    auto pin = semirigid_factors(2.059e11, I, 5.0, ConnectionModel::pinned(), ConnectionModel::rigid());
    CHECK(pin.pinned_a());
}

TEST_CASE("rigid factors give the textbook frame element", "[element]") {
    const double E = 2e11, A = 0.005, I = 4e-5, L = 4.0;
    auto k = local_stiffness(E, A, I, L, SemiRigidFactors{});
    CHECK(testing::max_rel(k, rigid_textbook(E, A, I, L)) < 1e-14);
}

TEST_CASE("pinned-pinned element is a truss", "[element]") {
    const double E = 2e11, A = 0.005, I = 4e-5, L = 4.0;
    auto f = semirigid_factors(E, I, L, ConnectionModel::pinned(), ConnectionModel::pinned());
    auto k = local_stiffness(E, A, I, L, f);
    Matrix6 truss = Matrix6::Zero();
    truss(0, 0) = truss(3, 3) = E * A / L;
    truss(0, 3) = truss(3, 0) = -E * A / L;
    CHECK(k == truss);
    CHECK(testing::max_rel(condensation_oracle(E, A, I, L, 0.0, 0.0), truss) < 1e-10);
}

TEST_CASE("one pinned end matches the flexibility oracle in the limit", "[element]") {
    const double E = 2e11, A = 0.005, I = 4e-5, L = 4.0, kb = 3e7;
    auto f = semirigid_factors(E, I, L, ConnectionModel::pinned(), ConnectionModel::semi_rigid(kb));
    auto k = local_stiffness(E, A, I, L, f);
    CHECK(testing::max_rel(k, flexibility_element(E, A, I, L, 1e-6 * E * I / L, kb)) < 1e-5);
    CHECK(testing::max_rel(k, condensation_oracle(E, A, I, L, 0.0, kb)) < 1e-10);
}

TEST_CASE("closed form matches both oracles over random samples", "[element]") {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto logu = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(gen)); };
    for (int n = 0; n < 100; ++n) {
        const double E = logu(1e10, 3e11), A = logu(1e-3, 5e-2), I = logu(1e-6, 1e-3), L = logu(1.0, 12.0);
        const double ka = logu(1e-2, 1e2) * E * I / L, kb = logu(1e-2, 1e2) * E * I / L;
        auto f = semirigid_factors(E, I, L, ConnectionModel::semi_rigid(ka), ConnectionModel::semi_rigid(kb));
        auto k = local_stiffness(E, A, I, L, f);
        CHECK(testing::max_rel(k, flexibility_element(E, A, I, L, ka, kb)) < 1e-10);
        CHECK(testing::max_rel(k, condensation_oracle(E, A, I, L, ka, kb)) < 1e-10);

        const double wx = (u(gen) - 0.5) * 2e4, wy = (u(gen) - 0.5) * 8e4;
        auto fef = fixed_end_forces(wx, wy, L, f);
        CHECK(testing::max_rel(fef, flexibility_fixed_end(E, I, L, ka, kb, wx, wy)) < 1e-10);
        CHECK(testing::max_rel(fef, condensation_oracle_fixed_end_forces(E, A, I, L, ka, kb, wx, wy)) < 1e-10);
    }
}

TEST_CASE("mixed rigid and flexible ends match the oracle", "[element]") {
    const double E = 2.059e11, A = 0.004, I = 5e-5, L = 5.0;
    const double kb = E * I / (L * 0.5); // alpha_a = 0, alpha_b = 0.5
    auto f = semirigid_factors(E, I, L, ConnectionModel::rigid(), ConnectionModel::semi_rigid(kb));
    CHECK(f.alpha_b == Approx(0.5));
    // zero spring flexibility is an exactly rigid end here
    CHECK(testing::max_rel(local_stiffness(E, A, I, L, f), flexibility_element(E, A, I, L, 0.0, kb)) < 1e-12);
}

TEST_CASE("equal springs reduce the end moment by 1/(1+2 alpha)", "[element]") {
    for (double alpha : {0.0, 0.01, 0.1, 0.39911, 1.0, 5.0}) {
        SemiRigidFactors f{alpha, alpha};
        CHECK(f.denominator() == Approx((1 + 2 * alpha) * (1 + 6 * alpha)).epsilon(1e-15));
        const double w = 39240.0, L = 5.0;
        auto fef = fixed_end_forces(-w, L, f);
        const double expected = (w * L * L / 12.0) / (1.0 + 2.0 * alpha);
        CHECK(std::abs(std::abs(fef(2)) - expected) <= 1e-10 * expected);
        CHECK(std::abs(std::abs(fef(5)) - expected) <= 1e-10 * expected);
    }
}

TEST_CASE("fixed-end force examples", "[element]") {
    auto rigid = fixed_end_forces(-10e3, 5.0, SemiRigidFactors{});
    CHECK(std::abs(rigid(2)) == Approx(20833.333333333333).epsilon(1e-14));
    CHECK(std::abs(rigid(5)) == Approx(20833.333333333333).epsilon(1e-14));
    CHECK(rigid(1) == Approx(25e3));
    CHECK(rigid(4) == Approx(25e3));

    const double inf = std::numeric_limits<double>::infinity();
    auto simple = fixed_end_forces(-10e3, 5.0, SemiRigidFactors{inf, inf});
    CHECK(simple(2) == 0.0);
    CHECK(simple(5) == 0.0);
    CHECK(simple(1) == Approx(25e3));
    CHECK(simple(4) == Approx(25e3));

    // propped: pinned A, rigid B carries wL^2/8
    auto propped = fixed_end_forces(-10e3, 5.0, SemiRigidFactors{inf, 0.0});
    CHECK(propped(2) == 0.0);
    CHECK(std::abs(propped(5)) == Approx(10e3 * 25.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("element stiffness is symmetric PSD with a rigid-body null space", "[element]") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.05, 20.0);
    for (int n = 0; n < 20; ++n) {
        const double E = 2e11, A = 0.01, I = 1e-4, L = 6.0;
        const double ka = u(gen) * E * I / L, kb = u(gen) * E * I / L;
        auto f = semirigid_factors(E, I, L, ConnectionModel::semi_rigid(ka), ConnectionModel::semi_rigid(kb));
        Section s;
        s.area = A;
        s.moment_of_inertia_major = I;
        for (double angle : {0.0, 0.7, std::numbers::pi / 2}) {
            auto k = element_stiffness(s, E, L, f, angle);
            CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Matrix6> es(k);
            const auto ev = es.eigenvalues();
            const double top = ev.maxCoeff();
            int zero = 0;
            for (int i = 0; i < 6; ++i) {
                CHECK(ev(i) > -1e-10 * top);
                if (std::abs(ev(i)) < 1e-10 * top) ++zero;
            }
            CHECK(zero == 3);
        }
    }
}

TEST_CASE("very stiff springs approach the rigid element", "[element]") {
    const double E = 2e11, A = 0.005, I = 4e-5, L = 4.0;
    const double k = 1e18 * E * I / L;
    CHECK(testing::max_rel(flexibility_element(E, A, I, L, k, k), rigid_textbook(E, A, I, L)) < 1e-9);
    // condensation cancels k against k, so its best accuracy is near sqrt(eps)
    const double k8 = 1e8 * E * I / L;
    CHECK(testing::max_rel(condensation_oracle(E, A, I, L, k8, k8), rigid_textbook(E, A, I, L)) < 1e-6);
    auto f = semirigid_factors(E, I, L, ConnectionModel::semi_rigid(k), ConnectionModel::semi_rigid(k));
    CHECK(testing::max_rel(local_stiffness(E, A, I, L, f), rigid_textbook(E, A, I, L)) < 1e-9);
}

TEST_CASE("swapping ends with swapped springs permutes the matrix", "[element]") {
    const double E = 2e11, A = 0.005, I = 4e-5, L = 4.0, ka = 2e7, kb = 9e7;
    auto kab = local_stiffness(E, A, I, L, semirigid_factors(E, I, L, ConnectionModel::semi_rigid(ka),
                                                             ConnectionModel::semi_rigid(kb)));
    auto kba = local_stiffness(E, A, I, L, semirigid_factors(E, I, L, ConnectionModel::semi_rigid(kb),
                                                             ConnectionModel::semi_rigid(ka)));
    Matrix6 p = end_swap();
    CHECK(testing::max_rel(Matrix6(p * kab * p.transpose()), kba) < 1e-14);

    auto sym = condensation_oracle(E, A, I, L, ka, ka);
    CHECK(testing::max_rel(Matrix6(p * sym * p.transpose()), sym) < 1e-12);
}
