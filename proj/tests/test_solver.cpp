#include "support.hpp"

using namespace semirigid;
using Catch::Approx;

namespace {

// Hand-rolled rigid portal: dense 12x12 assembly, supports by penalty, LU.
Eigen::VectorXd brute_force_portal(const Section& col, const Section& beam, double E, double h, double L, double px) {
    struct El {
        int a, b;
        double x0, y0, x1, y1;
        const Section* s;
    };
    const double xy[4][2] = {{0, 0}, {0, h}, {L, h}, {L, 0}};
    std::vector<El> els = {{0, 1, xy[0][0], xy[0][1], xy[1][0], xy[1][1], &col},
                           {1, 2, xy[1][0], xy[1][1], xy[2][0], xy[2][1], &beam},
                           {3, 2, xy[3][0], xy[3][1], xy[2][0], xy[2][1], &col}};
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(12, 12);
    for (const auto& e : els) {
        const double dx = e.x1 - e.x0, dy = e.y1 - e.y0, l = std::hypot(dx, dy), c = dx / l, s = dy / l;
        const double A = e.s->area, I = e.s->moment_of_inertia_major;
        const double a = E * A / l, b = 12 * E * I / (l * l * l), cc = 6 * E * I / (l * l), d = 4 * E * I / l,
                     f = 2 * E * I / l;
        Matrix6 k;
        // clang-format off
        k <<  a,  0,   0, -a,  0,   0,
              0,  b,  cc,  0, -b,  cc,
              0, cc,   d,  0, -cc,  f,
             -a,  0,   0,  a,  0,   0,
              0, -b, -cc,  0,  b, -cc,
              0, cc,   f,  0, -cc,  d;
        // clang-format on
        Matrix6 t = Matrix6::Zero();
        for (int n : {0, 3}) {
            t(n, n) = c;
            t(n, n + 1) = s;
            t(n + 1, n) = -s;
            t(n + 1, n + 1) = c;
            t(n + 2, n + 2) = 1;
        }
        Matrix6 kg = t.transpose() * k * t;
        int dofs[6] = {3 * e.a, 3 * e.a + 1, 3 * e.a + 2, 3 * e.b, 3 * e.b + 1, 3 * e.b + 2};
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) K(dofs[i], dofs[j]) += kg(i, j);
    }
    const double penalty = 1e12 * K.diagonal().maxCoeff();
    for (int node : {0, 3})
        for (int c = 0; c < 3; ++c) K(3 * node + c, 3 * node + c) += penalty;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(12);
    f(3) = px;
    return K.fullPivLu().solve(f);
}

Frame portal(const Section& col, const Section& beam, double h, double L, ConnectionModel conn,
             Fixity base = Fixity::Fixed) {
    std::vector<DesignGroup> groups{{0, "C", MemberRole::Column, {col}}, {1, "B", MemberRole::Beam, {beam}}};
    std::vector<Member> members(3);
    members[0] = {0, 0, 1, MemberRole::Column, 0};
    members[1] = {1, 1, 2, MemberRole::Beam, 1, conn, conn};
    members[2] = {2, 3, 2, MemberRole::Column, 0};
    return Frame({{0, 0, 0}, {1, 0, h}, {2, L, h}, {3, L, 0}}, members, {{0, base}, {3, base}}, groups);
}

double roof(const AnalysisResult& r, const Frame& f) { return roof_displacement(r, f); }

Eigen::VectorXd flatten(const AnalysisResult& r) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(3 * r.displacements.size()));
    for (std::size_t i = 0; i < r.displacements.size(); ++i)
        for (int c = 0; c < 3; ++c) v(static_cast<Eigen::Index>(3 * i + c)) = r.displacements[i][c];
    return v;
}

} // namespace

TEST_CASE("rigid portal matches a brute-force assembly", "[solver]") {
    const auto& col = testing::catalog().lookup("W14X34");
    const auto& beam = testing::catalog().lookup("W16X26");
    const double E = 2.059e11, h = 3.2, L = 5.0, P = 50e3;
    Frame f = portal(col, beam, h, L, ConnectionModel::rigid());
    LoadCase lc;
    lc.nodal.push_back({1, P, 0.0, 0.0});
    auto r = assemble_and_solve(SizedFrame(f, {0, 0}), lc, E);
    auto expected = brute_force_portal(col, beam, E, h, L, P);
    CHECK(testing::max_rel(flatten(r), expected) < 1e-8);
}

TEST_CASE("spring beam end moments equal its fixed-end forces", "[solver]") {
    const auto& s = testing::catalog().lookup("W8X21");
    const double E = 2e11, L = 5.0, k = 2e7, w = 39240.0;
    Member m{0, 0, 1, MemberRole::Beam, 0, ConnectionModel::semi_rigid(k), ConnectionModel::semi_rigid(k)};
    Frame f({{0, 0, 0}, {1, L, 0}}, {m}, {{0, Fixity::Fixed}, {1, Fixity::Fixed}}, {{0, "B", MemberRole::Beam, {s}}});
    LoadCase lc;
    lc.members.push_back({0, w});
    auto r = assemble_and_solve(SizedFrame(f, {0}), lc, E);
    auto fef = fixed_end_forces(0.0, -w, L, semirigid_factors(E, s.moment_of_inertia_major, L, m.end_a, m.end_b));
    CHECK(testing::max_rel(r.member_end_forces[0], fef) < 1e-10);
}

TEST_CASE("equilibrium of frame3 under every combination", "[solver]") {
    auto pc = testing::frame3(bench::ConnectionVariant::Type1);
    auto problem = pc.problem();
    auto sized = apply_design(*pc.frame, *pc.design);
    auto cases = problem.load_cases(sized);
    auto results = assemble_and_solve(sized, cases, pc.modulus);
    for (std::size_t c = 0; c < cases.size(); ++c) {
        double fx = 0, fy = 0, mz = 0, scale = 0;
        for (const auto& p : cases[c].nodal) {
            const auto& n = pc.frame->nodes()[p.node];
            fx += p.fx;
            fy += p.fy;
            mz += p.mz + n.x * p.fy - n.y * p.fx;
            scale += std::abs(p.fx);
        }
        for (const auto& q : cases[c].members) {
            const auto& m = pc.frame->members()[q.member];
            const auto& a = pc.frame->nodes()[m.node_a];
            const auto& b = pc.frame->nodes()[m.node_b];
            fy -= q.w * m.length;
            mz -= q.w * m.length * 0.5 * (a.x + b.x);
            scale += std::abs(q.w) * m.length;
        }
        for (const auto& [node, r] : results[c].reactions) {
            const auto& n = pc.frame->nodes()[node];
            fx += r[0];
            fy += r[1];
            mz += r[2] + n.x * r[1] - n.y * r[0];
        }
        CHECK(std::abs(fx) < 1e-9 * scale);
        CHECK(std::abs(fy) < 1e-9 * scale);
        CHECK(std::abs(mz) < 1e-9 * scale * 10.0);
    }
}

TEST_CASE("symmetric gravity gives mirror lateral displacements", "[solver]") {
    auto pc = testing::frame3(bench::ConnectionVariant::Type4);
    auto sized = apply_design(*pc.frame, *pc.design);
    auto gravity = gravity_line_loads(pc.gravity, *pc.frame);
    auto r = assemble_and_solve(sized, gravity, pc.modulus);
    const double width = 15.0;
    for (const auto& a : pc.frame->nodes())
        for (const auto& b : pc.frame->nodes())
            if (std::abs(a.y - b.y) < 1e-9 && std::abs(a.x + b.x - width) < 1e-9) {
                CHECK(std::abs(r.displacements[a.id][0] + r.displacements[b.id][0]) < 1e-9);
                CHECK(std::abs(r.displacements[a.id][1] - r.displacements[b.id][1]) < 1e-9);
            }
}

TEST_CASE("rigid joints equal very stiff springs", "[solver]") {
    auto pc = testing::frame3();
    auto sized = apply_design(*pc.frame, *pc.design);
    auto members = pc.frame->members();
    for (auto& m : members) {
        if (m.role != MemberRole::Beam) continue;
        const double I = sized.member_section(m).moment_of_inertia_major;
        m.end_a = m.end_b = ConnectionModel::semi_rigid(1e16 * pc.modulus * I / m.length);
    }
    Frame stiff(pc.frame->nodes(), members, pc.frame->supports(), pc.frame->groups(), pc.frame->tributary_width());
    auto problem = pc.problem();
    auto cases = problem.load_cases(sized);
    for (const auto& lc : cases) {
        auto a = assemble_and_solve(sized, lc, pc.modulus);
        auto b = assemble_and_solve(SizedFrame(stiff, sized.assignment()), lc, pc.modulus);
        CHECK(testing::max_rel(flatten(a), flatten(b)) < 1e-6);
    }
}

TEST_CASE("pinned beam ends carry no moment", "[solver]") {
    auto pc = testing::frame3();
    Frame pinned = with_beam_connections(*pc.frame, ConnectionModel::pinned());
    auto sized = apply_design(pinned, *pc.design);
    auto problem = pc.problem();
    for (const auto& lc : problem.load_cases(apply_design(*pc.frame, *pc.design))) {
        auto r = assemble_and_solve(sized, lc, pc.modulus);
        for (const auto& m : pinned.members()) {
            if (m.role != MemberRole::Beam) continue;
            CHECK(std::abs(r.member_end_forces[m.id](2)) <= 1e-9);
            CHECK(std::abs(r.member_end_forces[m.id](5)) <= 1e-9);
        }
    }
}

TEST_CASE("stiffer connections never increase lateral sway", "[solver]") {
    auto pc = testing::frame3();
    auto sized = apply_design(*pc.frame, *pc.design);
    LoadCase lateral = pc.problem().seismic_model().load_case(sized);

    double previous = std::numeric_limits<double>::infinity();
    for (double k : {1e6, 8.33e7, 2.766e8, 3.325e8, 4.434e8, 1e10}) {
        Frame f = with_beam_connections(*pc.frame, ConnectionModel::semi_rigid(k));
        double d = roof(assemble_and_solve(SizedFrame(f, sized.assignment()), lateral, pc.modulus), f);
        CHECK(d < previous);
        previous = d;
    }
    CHECK(roof(assemble_and_solve(sized, lateral, pc.modulus), *pc.frame) <= previous);

    // one beam at a time
    Frame base = with_beam_connections(*pc.frame, ConnectionModel::semi_rigid(8.33e7));
    const double d0 = roof(assemble_and_solve(SizedFrame(base, sized.assignment()), lateral, pc.modulus), base);
    for (const auto& m : base.members()) {
        if (m.role != MemberRole::Beam) continue;
        auto members = base.members();
        members[m.id].end_a = members[m.id].end_b = ConnectionModel::semi_rigid(4.434e8);
        Frame f(base.nodes(), members, base.supports(), base.groups(), base.tributary_width());
        CHECK(roof(assemble_and_solve(SizedFrame(f, sized.assignment()), lateral, pc.modulus), f) <= d0);
    }
}

TEST_CASE("mechanisms are reported as unstable", "[solver]") {
    const auto& s = testing::catalog().lookup("W14X34");
    Frame f = portal(s, s, 3.2, 5.0, ConnectionModel::pinned(), Fixity::Pinned);
    LoadCase lc;
    lc.nodal.push_back({1, 1e3, 0.0, 0.0});
    try {
        assemble_and_solve(SizedFrame(f, {0, 0}), lc);
        FAIL("expected UnstableStructure");
    } catch (const UnstableStructure& e) {
        CHECK(e.node() < 4);
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
}

TEST_CASE("assembled stiffness is symmetric", "[solver]") {
    for (auto v : {bench::ConnectionVariant::Rigid, bench::ConnectionVariant::Type1, bench::ConnectionVariant::Type7}) {
        auto pc = testing::frame3(v);
        FrameAnalysis fa(apply_design(*pc.frame, *pc.design), pc.modulus);
        const auto& K = fa.reduced_stiffness();
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * K.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("load cases combine linearly", "[solver]") {
    auto pc = testing::frame3(bench::ConnectionVariant::Type5);
    auto sized = apply_design(*pc.frame, *pc.design);
    auto problem = pc.problem();
    auto cases = problem.load_cases(sized);
    auto r = assemble_and_solve(sized, cases, pc.modulus);
    Eigen::VectorXd g = flatten(r[0]), plus = flatten(r[1]), minus = flatten(r[2]);
    CHECK(testing::max_rel(Eigen::VectorXd(plus + minus), Eigen::VectorXd(2.0 * g)) < 1e-9);
    CHECK(r[1].transient);
    CHECK_FALSE(r[0].transient);
}
