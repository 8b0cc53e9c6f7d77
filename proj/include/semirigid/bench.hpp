#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "semirigid/config.hpp"
#include "semirigid/element.hpp"
#include "semirigid/solver.hpp"
#include "semirigid/units.hpp"

// Built-in problems: three-bay frames of 3, 5 and 9 stories (5 m bays,
// 3.2 m stories) and the spring-ended verification beam.
namespace semirigid::bench {

enum class BenchmarkId { Verify, Frame3, Frame5, Frame9 };
enum class ConnectionVariant { Rigid, Type1, Type4, Type5, Type7 };

inline BenchmarkId parse_benchmark(std::string_view s) {
    if (s == "verify") return BenchmarkId::Verify;
    if (s == "frame3") return BenchmarkId::Frame3;
    if (s == "frame5") return BenchmarkId::Frame5;
    if (s == "frame9") return BenchmarkId::Frame9;
    throw ValidationError("unknown benchmark '" + std::string(s) + "' (expected frame3, frame5, frame9, verify)");
}

inline std::string_view to_string(BenchmarkId id) {
    switch (id) {
    case BenchmarkId::Verify: return "verify";
    case BenchmarkId::Frame3: return "frame3";
    case BenchmarkId::Frame5: return "frame5";
    case BenchmarkId::Frame9: return "frame9";
    }
    return "?";
}

inline ConnectionVariant parse_variant(std::string_view s) {
    if (s == "rigid") return ConnectionVariant::Rigid;
    if (s == "1") return ConnectionVariant::Type1;
    if (s == "4") return ConnectionVariant::Type4;
    if (s == "5") return ConnectionVariant::Type5;
    if (s == "7") return ConnectionVariant::Type7;
    throw ValidationError("unknown connection '" + std::string(s) + "' (expected rigid, 1, 4, 5, 7)");
}

inline std::string_view to_string(ConnectionVariant v) {
    switch (v) {
    case ConnectionVariant::Rigid: return "rigid";
    case ConnectionVariant::Type1: return "1";
    case ConnectionVariant::Type4: return "4";
    case ConnectionVariant::Type5: return "5";
    case ConnectionVariant::Type7: return "7";
    }
    return "?";
}

inline constexpr ConnectionVariant all_variants[] = {ConnectionVariant::Type1, ConnectionVariant::Type4,
                                                     ConnectionVariant::Type5, ConnectionVariant::Type7,
                                                     ConnectionVariant::Rigid};

/// Rotational stiffness of the connection types, N*m/rad (tabulated in N*cm/rad).
inline double connection_stiffness(ConnectionVariant v) {
    switch (v) {
    case ConnectionVariant::Type1: return 833e7 * units::n_cm;
    case ConnectionVariant::Type4: return 2766e7 * units::n_cm;
    case ConnectionVariant::Type5: return 3325e7 * units::n_cm;
    case ConnectionVariant::Type7: return 4434e7 * units::n_cm;
    case ConnectionVariant::Rigid: break;
    }
    return std::numeric_limits<double>::infinity();
}

inline ConnectionModel connection_model(ConnectionVariant v) {
    return v == ConnectionVariant::Rigid ? ConnectionModel::rigid() : ConnectionModel::semi_rigid(connection_stiffness(v));
}

/// Section pool for the 3- and 5-story frames (32 shapes, W12 through W18X65).
inline std::vector<std::string> light_pool() {
    return {"W12X14", "W12X16", "W12X19", "W12X22", "W12X26", "W12X30", "W12X35", "W14X22", "W14X26", "W14X30", "W14X34",
            "W14X38", "W14X43", "W14X48", "W14X53", "W14X61", "W14X68", "W14X74", "W16X26", "W16X31", "W16X36", "W16X40",
            "W16X45", "W16X50", "W16X57", "W18X35", "W18X40", "W18X46", "W18X50", "W18X55", "W18X60", "W18X65"};
}

/// Section pool for the 9-story frame (32 shapes).
inline std::vector<std::string> heavy_pool() {
    return {"W12X30", "W12X35", "W14X48", "W14X53", "W14X61", "W14X68", "W14X74", "W16X45", "W16X50", "W16X57", "W18X35",
            "W18X40", "W18X46", "W18X50", "W18X55", "W18X60", "W18X65", "W18X71", "W18X76", "W18X86", "W21X44", "W21X50",
            "W21X55", "W21X62", "W21X68", "W21X73", "W21X101", "W24X55", "W24X62", "W24X68", "W27X84", "W27X102"};
}

namespace detail {

struct GroupDef {
    const char* label;
    const char* role;
    std::size_t from;
    std::size_t to;
    const char* lines;
};

inline json frame_document(std::string_view name, std::size_t stories, const std::vector<GroupDef>& groups,
                           const std::vector<std::string>& pool, ConnectionVariant variant,
                           const std::vector<std::pair<const char*, const char*>>& design) {
    json doc;
    doc["name"] = std::string(name);
    doc["modulus_pa"] = units::steel_modulus;
    doc["unit_weight_npm3"] = units::steel_unit_weight;
    doc["tributary_width_m"] = 5.0;
    doc["connection_variant"] = std::string(to_string(variant));
    doc["grid"] = {{"bays", 3},
                   {"bay_m", 5.0},
                   {"stories", stories},
                   {"story_m", 3.2},
                   {"beam_conn", connection_string(connection_model(variant))},
                   {"column_conn", "rigid"},
                   {"base", "fixed"}};
    json gj = json::array();
    for (const auto& g : groups) {
        json e = {{"label", g.label}, {"role", g.role}, {"stories", {g.from, g.to}}};
        if (std::string_view(g.role) == "column") e["lines"] = g.lines;
        e["pool"] = pool;
        gj.push_back(e);
    }
    doc["groups"] = gj;
    doc["loads"] = {{"dead_npm2", 5886.0},
                    {"live_npm2", 1962.0},
                    {"roof_live_npm2", 1471.5},
                    {"tributary_width_m", 5.0},
                    {"seismic_includes_live", false},
                    {"seismic", {{"A", 0.3}, {"B", 2.5}, {"I", 1.0}, {"R", 8.0}}},
                    {"combination", {{"gravity", 1.0}, {"seismic", 1.0}}}};
    doc["limits"] = {{"drift_denominator", 300.0}, {"fy_pa", 2.4e8}, {"transient_increase", 4.0 / 3.0}, {"column_axis", "minor"}};
    doc["fuzzy"] = {{"shape", "bilinear"},
                    {"mu_knee", 0.5},
                    {"n_factor", 1.5},
                    {"delta_g", 0.05},
                    {"pilot_generations", 10},
                    {"seed_from_pilot", true},
                    {"mode", "lambda"},
                    {"penalty", {{"s_f", 10.0}, {"alpha", 1.0}, {"beta", 0.0}, {"gamma", 1.0}, {"omega", 0.0}}}};
    doc["ga"] = {{"population", 30},
                 {"elitism_rate", 0.1},
                 {"mutation_rate", 0.005},
                 {"generations", stories <= 3 ? 75 : 100},
                 {"seed", 1},
                 {"restarts", 10},
                 {"selection", "uniform"}};
    json d = json::object();
    for (const auto& [label, section] : design) d[label] = section;
    doc["design"] = d;
    return doc;
}

} // namespace detail

/// Config document of a benchmark frame. Group layout:
///  frame3: G1 exterior columns, G2 interior columns, G3 floor beams 1-2, G4 roof beams.
///  frame5: G1/G5 exterior/interior columns 1-3, G3/G6 exterior/interior columns 4-5,
///          G2 beams 1-2, G4 beams 3-4, G7 roof beams.
///  frame9: G1/G2 exterior/interior columns 1-3, G3/G4 columns 4-6, G5/G6 columns 7-9,
///          G7 beams 1-3, G8 beams 4-6, G9 beams 7-8, G10 roof beams.
inline json benchmark_document(BenchmarkId id, ConnectionVariant variant) {
    using detail::GroupDef;
    switch (id) {
    case BenchmarkId::Frame3:
        return detail::frame_document("frame3", 3,
                                      {{"G1", "column", 1, 3, "exterior"},
                                       {"G2", "column", 1, 3, "interior"},
                                       {"G3", "beam", 1, 2, ""},
                                       {"G4", "beam", 3, 3, ""}},
                                      light_pool(), variant,
                                      {{"G1", "W16X31"}, {"G2", "W14X34"}, {"G3", "W14X38"}, {"G4", "W16X26"}});
    case BenchmarkId::Frame5:
        return detail::frame_document("frame5", 5,
                                      {{"G1", "column", 1, 3, "exterior"},
                                       {"G2", "beam", 1, 2, ""},
                                       {"G3", "column", 4, 5, "exterior"},
                                       {"G4", "beam", 3, 4, ""},
                                       {"G5", "column", 1, 3, "interior"},
                                       {"G6", "column", 4, 5, "interior"},
                                       {"G7", "beam", 5, 5, ""}},
                                      light_pool(), variant,
                                      {{"G1", "W16X40"},
                                       {"G2", "W16X26"},
                                       {"G3", "W14X38"},
                                       {"G4", "W16X26"},
                                       {"G5", "W14X48"},
                                       {"G6", "W14X38"},
                                       {"G7", "W16X26"}});
    case BenchmarkId::Frame9:
        return detail::frame_document("frame9", 9,
                                      {{"G1", "column", 1, 3, "exterior"},
                                       {"G2", "column", 1, 3, "interior"},
                                       {"G3", "column", 4, 6, "exterior"},
                                       {"G4", "column", 4, 6, "interior"},
                                       {"G5", "column", 7, 9, "exterior"},
                                       {"G6", "column", 7, 9, "interior"},
                                       {"G7", "beam", 1, 3, ""},
                                       {"G8", "beam", 4, 6, ""},
                                       {"G9", "beam", 7, 8, ""},
                                       {"G10", "beam", 9, 9, ""}},
                                      heavy_pool(), variant,
                                      {{"G1", "W21X55"},
                                       {"G2", "W24X55"},
                                       {"G3", "W24X62"},
                                       {"G4", "W21X55"},
                                       {"G5", "W21X55"},
                                       {"G6", "W21X73"},
                                       {"G7", "W18X50"},
                                       {"G8", "W18X50"},
                                       {"G9", "W18X40"},
                                       {"G10", "W18X46"}});
    case BenchmarkId::Verify: break;
    }
    throw ValidationError("the verification beam has no frame document; use run_verification");
}

inline ProblemConfig benchmark(BenchmarkId id, ConnectionVariant variant, const SectionCatalog& catalog) {
    return build_problem(benchmark_document(id, variant), catalog);
}

// ---------------------------------------------------------------------------
// Verification beam: one member clamped at both nodes through rotational
// springs, under uniform load.

struct VerificationParams {
    std::string section = "W8X21";
    double modulus = 29000.0 * units::ksi;          // Pa
    double k_rot = 27795.0 * units::kip_inch;       // N*m/rad
    double span = 5.0;                              // m
    double w = 39240.0;                             // N/m, downward
    double perturbation = 0.0;                      // test hook: skews the closed-form constant
};

struct VerificationCheck {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass() const { return error <= tolerance; }
};

struct VerificationReport {
    double e_ksi = 0.0;
    double i_in4 = 0.0;
    double k_kip_in = 0.0;
    double alpha = 0.0;
    double rigid_moment = 0.0;      // N*m, wL^2/12
    double end_moment = 0.0;        // N*m, from the frame solver
    double reduction_solver = 0.0;  // end_moment / rigid_moment
    double reduction_closed = 0.0;  // 1 / (1 + 2 alpha)
    double stiff_limit_reduction = 0.0;
    double pinned_limit_moment = 0.0;
    std::vector<VerificationCheck> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
};

namespace detail {

inline double relative_difference(const Matrix6& a, const Matrix6& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

inline double relative_difference(const Vector6& a, const Vector6& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

/// End moment at A of the clamped spring beam, solved through the frame solver.
inline Vector6 spring_beam_end_forces(const Section& section, const VerificationParams& p, const ConnectionModel& conn) {
    std::vector<DesignGroup> groups{{0, "B", MemberRole::Beam, {section}}};
    Member m;
    m.node_a = 0;
    m.node_b = 1;
    m.end_a = m.end_b = conn;
    Frame frame({{0, 0.0, 0.0}, {1, p.span, 0.0}}, {m}, {{0, Fixity::Fixed}, {1, Fixity::Fixed}}, std::move(groups));
    LoadCase lc;
    lc.members.push_back({0, p.w});
    return assemble_and_solve(SizedFrame(frame, {0}), lc, p.modulus).member_end_forces.at(0);
}

} // namespace detail

inline VerificationReport run_verification(const SectionCatalog& catalog, const VerificationParams& p = {}) {
    const Section& s = catalog.lookup(p.section);
    const double I = s.moment_of_inertia_major;
    const double E = p.modulus;
    const double L = p.span;
    const double in4 = std::pow(units::inch, 4);

    VerificationReport r;
    r.e_ksi = E / units::ksi;
    r.i_in4 = I / in4;
    r.k_kip_in = p.k_rot / units::kip_inch;

    const auto conn = ConnectionModel::semi_rigid(p.k_rot);
    const auto f = semirigid_factors(E, I, L, conn, conn);
    r.alpha = f.alpha_a;
    r.rigid_moment = p.w * L * L / 12.0;

    const Vector6 solved = detail::spring_beam_end_forces(s, p, conn);
    r.end_moment = solved(2);
    r.reduction_solver = r.end_moment / r.rigid_moment;
    r.reduction_closed = 1.0 / (1.0 + 2.0 * (1.0 + p.perturbation) * r.alpha);

    const Matrix6 closed = local_stiffness(E, s.area, I, L, f);
    const Matrix6 oracle = condensation_oracle(E, s.area, I, L, p.k_rot, p.k_rot);
    const Vector6 fef = fixed_end_forces(0.0, -p.w, L, f);
    const Vector6 fef_oracle = condensation_oracle_fixed_end_forces(E, s.area, I, L, p.k_rot, p.k_rot, 0.0, -p.w);

    const auto stiff = ConnectionModel::semi_rigid(1e12 * E * I / L);
    r.stiff_limit_reduction = detail::spring_beam_end_forces(s, p, stiff)(2) / r.rigid_moment;
    const Vector6 pinned = detail::spring_beam_end_forces(s, p, ConnectionModel::pinned());
    r.pinned_limit_moment = std::max(std::abs(pinned(2)), std::abs(pinned(5)));

    r.checks = {
        {"element stiffness vs condensation oracle", detail::relative_difference(closed, oracle), 1e-10},
        {"fixed-end forces vs condensation oracle", detail::relative_difference(fef, fef_oracle), 1e-10},
        {"solver end moment vs closed form 1/(1+2a)", std::abs(r.reduction_solver - r.reduction_closed), 1e-10},
        {"end moments symmetric", std::abs(solved(2) + solved(5)) / r.rigid_moment, 1e-10},
        {"stiff-spring limit -> rigid", std::abs(r.stiff_limit_reduction - 1.0), 1e-9},
        {"pinned limit -> zero end moment", r.pinned_limit_moment / r.rigid_moment, 1e-9},
    };
    return r;
}

inline std::string format_verification(const VerificationReport& r, const VerificationParams& p = {}) {
    std::string out;
    out += "Spring-ended beam under uniform load\n";
    out += fmt::format("{:<10} {:>10} {:>10} {:>12} {:>10} {:>14} {:>14}\n", "Section", "E (ksi)", "I (in^4)",
                       "Ki (k.in/rad)", "alpha", "M_end (k.in)", "M_rigid (k.in)");
    out += fmt::format("{:<10} {:>10.5g} {:>10.4g} {:>12.5g} {:>10.5f} {:>14.6g} {:>14.6g}\n", p.section, r.e_ksi,
                       r.i_in4, r.k_kip_in, r.alpha, std::abs(r.end_moment) / units::kip_inch,
                       r.rigid_moment / units::kip_inch);
    out += fmt::format("span {} m, w {} N/m; reduction solver {:.12f}, closed form {:.12f}\n", p.span, p.w,
                       r.reduction_solver, r.reduction_closed);
    for (const auto& c : r.checks)
        out += fmt::format("[{}] {:<44} error {:.3e} (tol {:.0e})\n", c.pass() ? "PASS" : "FAIL", c.name, c.error,
                           c.tolerance);
    return out;
}

} // namespace semirigid::bench
