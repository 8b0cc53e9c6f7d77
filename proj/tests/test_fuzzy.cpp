#include "support.hpp"

#include <random>

using namespace semirigid;
using namespace semirigid::fuzzy;

namespace {

ObjectiveMembership objective(Shape shape) {
    ObjectiveMembership m;
    m.f_lower = 30000.0;
    m.f_upper = 40000.0;
    m.f_max = 60000.0;
    m.mu_knee = 0.5;
    m.shape = shape;
    return m;
}

ConstraintMembership constraint(Shape shape) {
    ConstraintMembership m;
    m.shape = shape;
    return m;
}

} // namespace

TEST_CASE("objective membership examples", "[fuzzy]") {
    auto m = objective(Shape::Bilinear);
    CHECK(objective_membership(m.f_lower, m) == 1.0);
    CHECK(objective_membership(0.0, m) == 1.0);
    CHECK(objective_membership(m.f_upper, m) == 0.5);
    CHECK(objective_membership(0.5 * (m.f_upper + m.f_max), m) == 0.25);
    CHECK(objective_membership(m.f_max, m) == 0.0);
    CHECK(objective_membership(1e9, m) == 0.0);

    auto lin = objective(Shape::Linear);
    CHECK(objective_membership(0.5 * (lin.f_lower + lin.f_upper), lin) == 0.5);
    CHECK(objective_membership(lin.f_upper, lin) == 0.0);

    auto crisp = objective(Shape::Crisp);
    CHECK(objective_membership(crisp.f_upper, crisp) == 1.0);
    CHECK(objective_membership(crisp.f_upper + 1.0, crisp) == 0.0);
}

TEST_CASE("constraint membership examples", "[fuzzy]") {
    auto m = constraint(Shape::Bilinear);
    CHECK(constraint_membership(0.9, m) == 1.0);
    CHECK(constraint_membership(1.0, m) == 1.0);
    CHECK(constraint_membership(m.g_upper(), m) == 0.0);
    CHECK(constraint_membership(m.g_allow + m.delta_g, m) == 0.5);
    CHECK(constraint_membership(5.0, m) == 0.0);

    auto crisp = constraint(Shape::Crisp);
    CHECK(constraint_membership(1.0001, crisp) == 0.0);
    CHECK(constraint_membership(1.0, crisp) == 1.0);

    auto lin = constraint(Shape::Linear);
    CHECK(constraint_membership(m.g_allow + m.delta_g, lin) == 0.0);
    CHECK(constraint_membership(m.g_allow + 0.5 * m.delta_g, lin) == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("membership parameters are validated", "[fuzzy]") {
    auto m = objective(Shape::Bilinear);
    m.f_max = m.f_upper;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    auto c = constraint(Shape::Bilinear);
    c.delta_g = 0.6;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = constraint(Shape::Bilinear);
    c.mu_knee = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK_THROWS_AS(parse_shape("trapezoid"), ValidationError);
}

TEST_CASE("lambda is the minimum membership", "[fuzzy]") {
    std::vector<double> g{0.6, 0.9};
    CHECK(aggregate_lambda(0.8, g) == 0.6);
    std::vector<double> ones(5, 1.0);
    CHECK(aggregate_lambda(1.0, ones) == 1.0);
    std::vector<double> with_zero{0.4, 0.0, 0.7};
    CHECK(aggregate_lambda(0.9, with_zero) == 0.0);
    CHECK(aggregate_lambda(0.3, std::vector<double>{}) == 0.3);

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 1000; ++n) {
        std::vector<double> mu(1 + gen() % 40);
        for (auto& x : mu) x = u(gen);
        const double f = u(gen);
        double brute = f;
        for (double x : mu)
            if (x < brute) brute = x;
        CHECK(std::abs(aggregate_lambda(f, mu) - brute) <= 1e-15);

    }
}

TEST_CASE("lambda is non-decreasing in each membership", "[fuzzy]") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 500; ++n) {
        std::vector<double> mu(1 + gen() % 10);
        for (auto& x : mu) x = u(gen);
        const double f = u(gen);
        auto raised = mu;
        auto& x = raised[gen() % raised.size()];
        x = x + (1.0 - x) * u(gen);
        CHECK(aggregate_lambda(f, raised) >= aggregate_lambda(f, mu));
        CHECK(aggregate_lambda(std::min(1.0, f + 0.1), mu) >= aggregate_lambda(f, mu));
    }
}

TEST_CASE("penalized phi", "[fuzzy]") {
    PenaltyConfig cfg;
    std::vector<double> ones{1.0, 1.0};
    std::vector<double> one{1.0};
    CHECK(penalized_phi(1.0, 1.0, ones, one, one, cfg) == -cfg.s_f);

    // lambda = 0: 1/2 [alpha (beta - 1)^2 + sum gamma (omega - 1)^2]
    cfg.alpha = 2.0;
    cfg.beta = 0.25;
    cfg.gamma = {3.0};
    cfg.omega = {0.5};
    std::vector<double> some{0.3, 0.8};
    const double expected = 0.5 * (2.0 * 0.75 * 0.75 + 4 * 3.0 * 0.25);
    CHECK(penalized_phi(0.0, 0.7, some, one, one, cfg) == Catch::Approx(expected).epsilon(1e-15));

    // zero memberships are floored, so phi stays finite
    std::vector<double> zero{0.0};
    CHECK(std::isfinite(penalized_phi(0.5, 0.0, zero, zero, zero, PenaltyConfig{})));

    // per-constraint multipliers
    PenaltyConfig each;
    each.gamma = {1.0, 0.0, 2.0, 0.0};
    each.omega = {0.0};
    std::vector<double> s{0.5, 0.5};
    std::vector<double> d{0.5};
    std::vector<double> a{0.5};
    // terms with gamma 1 and 2 at lambda/mu - 1 = 0.0 (lambda = 0.5)
    CHECK(penalized_phi(0.5, 0.5, s, d, a, each) == Catch::Approx(-each.s_f * 0.5).epsilon(1e-15));
}

TEST_CASE("phi decreases as lambda grows near satisfaction", "[fuzzy]") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.6, 1.0);
    PenaltyConfig cfg;
    for (int n = 0; n < 200; ++n) {
        std::vector<double> s(6), d(1), a(2);
        for (auto& x : s) x = u(gen);
        for (auto& x : d) x = u(gen);
        for (auto& x : a) x = u(gen);
        const double mf = u(gen);
        double lambda = aggregate_lambda(mf, s);
        lambda = aggregate_lambda(lambda, d);
        lambda = aggregate_lambda(lambda, a);
        const double h = 1e-6;
        const double lo = std::max(0.0, lambda - h);
        CHECK(penalized_phi(lambda, mf, s, d, a, cfg) < penalized_phi(lo, mf, s, d, a, cfg));
    }
}

TEST_CASE("fitness modes", "[fuzzy]") {
    Memberships full{1.0, {1.0, 1.0}, {1.0}, {}};
    CHECK(fitness(full, FitnessMode::Lambda) == 1.0);
    CHECK(fitness(full, FitnessMode::Phi) == 10.0);

    auto m = constraint(Shape::Bilinear);
    Memberships broken{0.9, {constraint_membership(1.6, m)}, {1.0}, {}};
    CHECK(fitness(broken, FitnessMode::Lambda) == 0.0);

    Memberships weaker{0.9, {0.4, 0.7}, {0.8}, {}};
    Memberships dominating{0.95, {0.5, 0.7}, {0.9}, {}};
    CHECK(fitness(dominating, FitnessMode::Lambda) >= fitness(weaker, FitnessMode::Lambda));
}

TEST_CASE("bilinear keeps discriminating beyond F''", "[fuzzy]") {
    auto bi = objective(Shape::Bilinear);
    auto lin = objective(Shape::Linear);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 1000; ++n) {
        double f1 = bi.f_upper + (bi.f_max - bi.f_upper) * u(gen);
        double f2 = bi.f_upper + (bi.f_max - bi.f_upper) * u(gen);
        if (f1 == f2 || f1 == bi.f_upper || f2 == bi.f_upper) continue;
        if (f1 > f2) std::swap(f1, f2);
        const double m1 = objective_membership(f1, bi), m2 = objective_membership(f2, bi);
        CHECK(0.0 < m2);
        CHECK(m2 < m1);
        CHECK(objective_membership(f1, lin) == 0.0);
        CHECK(objective_membership(f2, lin) == 0.0);
    }
}

TEST_CASE("memberships are non-increasing and Lipschitz", "[fuzzy]") {
    for (auto shape : {Shape::Linear, Shape::Bilinear}) {
        auto o = objective(shape);
        auto c = constraint(shape);
        const double lip_o = shape == Shape::Linear ? 1.0 / (o.f_upper - o.f_lower)
                                                    : std::max((1.0 - o.mu_knee) / (o.f_upper - o.f_lower),
                                                               o.mu_knee / (o.f_max - o.f_upper));
        const double lip_c = shape == Shape::Linear ? 1.0 / c.delta_g
                                                    : std::max((1.0 - c.mu_knee) / c.delta_g,
                                                               c.mu_knee / (c.g_upper() - c.g_allow - c.delta_g));
        for (double x = 20000.0; x < 70000.0; x += 37.0) {
            const double e = 11.0;
            const double a = objective_membership(x, o), b = objective_membership(x + e, o);
            CHECK(b <= a);
            CHECK(a - b <= lip_o * e * (1 + 1e-12));
        }
        for (double g = 0.0; g < 2.0; g += 0.0013) {
            const double e = 1e-3;
            const double a = constraint_membership(g, c), b = constraint_membership(g + e, c);
            CHECK(b <= a);
            CHECK(a - b <= lip_c * e * (1 + 1e-9));
        }
    }
}

TEST_CASE("crisp memberships are exactly 0 or 1", "[fuzzy]") {
    auto o = objective(Shape::Crisp);
    auto c = constraint(Shape::Crisp);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int n = 0; n < 500; ++n) {
        const double mo = objective_membership(u(gen) * 30000.0, o);
        const double mc = constraint_membership(u(gen), c);
        CHECK((mo == 0.0 || mo == 1.0));
        CHECK((mc == 0.0 || mc == 1.0));
    }
}
