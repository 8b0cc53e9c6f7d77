#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "semirigid/error.hpp"
#include "semirigid/model.hpp"
#include "semirigid/optimizer.hpp"
#include "semirigid/problem.hpp"
#include "semirigid/sections.hpp"

// JSON problem documents: frame topology (explicit or `grid` shorthand),
// loads, limits, fuzzy and GA settings, and an optional design.
namespace semirigid {

using json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors carry line and column.
inline json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError(fmt::format("malformed config at line {}, column {}: {}", line, col, e.what()));
    }
}

inline ConnectionModel parse_connection(std::string_view text) {
    if (text == "rigid") return ConnectionModel::rigid();
    if (text == "pinned") return ConnectionModel::pinned();
    constexpr std::string_view prefix = "semirigid:";
    if (text.substr(0, prefix.size()) == prefix) {
        auto num = text.substr(prefix.size());
        double k = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
        if (ec != std::errc{} || ptr != num.data() + num.size())
            throw ValidationError("bad connection stiffness in '" + std::string(text) + "'");
        return ConnectionModel::semi_rigid(k);
    }
    throw ValidationError("unknown connection '" + std::string(text) + "' (expected rigid, pinned, semirigid:<K>)");
}

inline std::string connection_string(const ConnectionModel& c) {
    switch (c.kind) {
    case ConnectionKind::Rigid: return "rigid";
    case ConnectionKind::Pinned: return "pinned";
    case ConnectionKind::SemiRigid: return fmt::format("semirigid:{}", c.k_rot);
    }
    return "rigid";
}

inline MemberRole parse_role(std::string_view s) {
    if (s == "beam") return MemberRole::Beam;
    if (s == "column") return MemberRole::Column;
    throw ValidationError("unknown member role '" + std::string(s) + "' (expected beam, column)");
}

inline Fixity parse_fixity(std::string_view s) {
    if (s == "fixed") return Fixity::Fixed;
    if (s == "pinned") return Fixity::Pinned;
    throw ValidationError("unknown support fixity '" + std::string(s) + "' (expected fixed, pinned)");
}

/// Everything a config document describes.
struct ProblemConfig {
    std::string name;
    std::shared_ptr<const Frame> frame;
    GravitySpec gravity;
    SeismicSpec seismic;
    bool seismic_includes_live = false;
    CombinationFactors factors;
    DesignLimits limits;
    double modulus = units::steel_modulus;
    double unit_weight = units::steel_unit_weight;
    FuzzyConfig fuzzy;
    GAConfig ga;
    std::optional<std::map<std::string, std::string>> design;

    Problem problem() const {
        return Problem(frame, gravity, seismic, limits, factors, seismic_includes_live, modulus, unit_weight);
    }
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

inline const json& require(const json& j, const char* key, std::string_view where) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(fmt::format("{}: missing required key '{}'", where, key));
    return *it;
}

inline PoolSpec parse_pool(const json& j) {
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "all")) return AllSections{};
    if (!j.is_array()) throw ValidationError("group pool must be \"all\" or a list of section names");
    return j.get<std::vector<std::string>>();
}

inline std::vector<double> number_or_list(const json& j, double fallback) {
    if (j.is_null()) return {fallback};
    if (j.is_number()) return {j.get<double>()};
    return j.get<std::vector<double>>();
}

inline std::shared_ptr<const Frame> parse_frame(const json& doc, const SectionCatalog& catalog, double trib) {
    const json& groups_j = require(doc, "groups", "config");
    if (!groups_j.is_array() || groups_j.empty()) throw ValidationError("config: 'groups' must be a non-empty list");

    if (auto g = doc.find("grid"); g != doc.end()) {
        GridSpec spec;
        spec.bays = require(*g, "bays", "grid").get<std::size_t>();
        spec.bay_m = require(*g, "bay_m", "grid").get<double>();
        spec.stories = require(*g, "stories", "grid").get<std::size_t>();
        spec.story_m = require(*g, "story_m", "grid").get<double>();
        spec.beam_connection = parse_connection(get_or<std::string>(*g, "beam_conn", "rigid"));
        spec.column_connection = parse_connection(get_or<std::string>(*g, "column_conn", "rigid"));
        spec.base = parse_fixity(get_or<std::string>(*g, "base", "fixed"));

        std::vector<GroupRule> rules;
        for (const auto& gj : groups_j) {
            GroupRule r;
            r.label = require(gj, "label", "group").get<std::string>();
            r.role = parse_role(require(gj, "role", "group " + r.label).get<std::string>());
            auto stories = gj.find("stories");
            if (stories == gj.end()) {
                r.story_from = 1;
                r.story_to = spec.stories;
            } else {
                auto range = stories->get<std::vector<std::size_t>>();
                if (range.size() != 2) throw ValidationError("group " + r.label + ": 'stories' must be [from, to]");
                r.story_from = range[0];
                r.story_to = range[1];
            }
            auto lines = get_or<std::string>(gj, "lines", "all");
            if (lines == "all") r.lines = GroupRule::Lines::All;
            else if (lines == "exterior") r.lines = GroupRule::Lines::Exterior;
            else if (lines == "interior") r.lines = GroupRule::Lines::Interior;
            else throw ValidationError("group " + r.label + ": 'lines' must be all, exterior or interior");
            r.pool = parse_pool(gj.contains("pool") ? gj["pool"] : json());
            rules.push_back(std::move(r));
        }
        return std::make_shared<const Frame>(grid_frame(spec, rules, catalog, trib));
    }

    std::vector<DesignGroup> groups;
    std::map<std::string, std::size_t> group_ids;
    for (const auto& gj : groups_j) {
        DesignGroup g;
        g.id = groups.size();
        g.label = require(gj, "label", "group").get<std::string>();
        g.role = parse_role(get_or<std::string>(gj, "role", "beam"));
        g.pool = candidate_pool(catalog, parse_pool(gj.contains("pool") ? gj["pool"] : json())).sections;
        if (!group_ids.emplace(g.label, g.id).second) throw ValidationError("duplicate group label '" + g.label + "'");
        groups.push_back(std::move(g));
    }

    std::vector<Node> nodes;
    for (const auto& nj : require(doc, "nodes", "config"))
        nodes.push_back({require(nj, "id", "node").get<std::size_t>(), require(nj, "x", "node").get<double>(),
                         require(nj, "y", "node").get<double>()});
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });

    std::vector<Member> members;
    for (const auto& mj : require(doc, "members", "config")) {
        Member m;
        m.id = require(mj, "id", "member").get<std::size_t>();
        m.node_a = require(mj, "a", "member").get<std::size_t>();
        m.node_b = require(mj, "b", "member").get<std::size_t>();
        m.role = parse_role(get_or<std::string>(mj, "role", "beam"));
        auto label = require(mj, "group", "member").get<std::string>();
        auto it = group_ids.find(label);
        if (it == group_ids.end())
            throw ValidationError(fmt::format("member {} references missing group '{}'", m.id, label));
        m.group = it->second;
        m.end_a = parse_connection(get_or<std::string>(mj, "conn_a", "rigid"));
        m.end_b = parse_connection(get_or<std::string>(mj, "conn_b", "rigid"));
        members.push_back(m);
    }
    std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) { return a.id < b.id; });

    std::vector<Support> supports;
    if (auto s = doc.find("supports"); s != doc.end())
        for (const auto& sj : *s)
            supports.push_back({require(sj, "node", "support").get<std::size_t>(),
                                parse_fixity(get_or<std::string>(sj, "fixity", "fixed"))});

    return std::make_shared<const Frame>(std::move(nodes), std::move(members), std::move(supports), std::move(groups),
                                         trib);
}

inline void parse_fuzzy(const json& f, FuzzyConfig& cfg) {
    if (f.contains("shape")) cfg.shape = fuzzy::parse_shape(f["shape"].get<std::string>());
    cfg.mu_knee = get_or(f, "mu_knee", cfg.mu_knee);
    if (f.contains("f_lower") && !f["f_lower"].is_null()) cfg.f_lower = f["f_lower"].get<double>();
    if (f.contains("f_upper") && !f["f_upper"].is_null()) cfg.f_upper = f["f_upper"].get<double>();
    if (f.contains("f_max") && !f["f_max"].is_null()) cfg.f_max = f["f_max"].get<double>();
    cfg.n_factor = get_or(f, "n_factor", cfg.n_factor);
    cfg.delta_g = get_or(f, "delta_g", cfg.delta_g);
    cfg.pilot_generations = get_or(f, "pilot_generations", cfg.pilot_generations);
    cfg.seed_from_pilot = get_or(f, "seed_from_pilot", cfg.seed_from_pilot);
    if (f.contains("mode")) cfg.mode = fuzzy::parse_fitness_mode(f["mode"].get<std::string>());
    if (auto p = f.find("penalty"); p != f.end()) {
        cfg.penalty.s_f = get_or(*p, "s_f", cfg.penalty.s_f);
        cfg.penalty.alpha = get_or(*p, "alpha", cfg.penalty.alpha);
        cfg.penalty.beta = get_or(*p, "beta", cfg.penalty.beta);
        if (p->contains("gamma")) cfg.penalty.gamma = number_or_list((*p)["gamma"], 1.0);
        if (p->contains("omega")) cfg.penalty.omega = number_or_list((*p)["omega"], 0.0);
    }
    fuzzy::ConstraintMembership{1.0, cfg.delta_g, cfg.n_factor, cfg.mu_knee, cfg.shape}.validate();
    cfg.penalty.validate();
}

inline void parse_ga(const json& g, GAConfig& cfg) {
    cfg.population_size = get_or(g, "population", cfg.population_size);
    cfg.elitism_rate = get_or(g, "elitism_rate", cfg.elitism_rate);
    cfg.mutation_rate = get_or(g, "mutation_rate", cfg.mutation_rate);
    cfg.max_generations = get_or(g, "generations", cfg.max_generations);
    cfg.seed = get_or<std::uint64_t>(g, "seed", cfg.seed);
    cfg.restarts = get_or(g, "restarts", cfg.restarts);
    cfg.init_attempts = get_or(g, "init_attempts", cfg.init_attempts);
    cfg.repair_initial = get_or(g, "repair_initial", cfg.repair_initial);
    if (g.contains("selection")) cfg.selection = parse_selection(g["selection"].get<std::string>());
    cfg.validate();
}

} // namespace detail

/// Builds a validated problem from a parsed document.
inline ProblemConfig build_problem(const json& doc, const SectionCatalog& catalog) {
    try {
        if (!doc.is_object()) throw ValidationError("config must be a JSON object");
        ProblemConfig pc;
        pc.name = detail::get_or<std::string>(doc, "name", "");
        pc.modulus = detail::get_or(doc, "modulus_pa", pc.modulus);
        pc.unit_weight = detail::get_or(doc, "unit_weight_npm3", pc.unit_weight);
        if (!(pc.modulus > 0.0) || !(pc.unit_weight > 0.0))
            throw ValidationError("modulus and unit weight must be positive");

        double trib = detail::get_or(doc, "tributary_width_m", 5.0);
        if (auto l = doc.find("loads"); l != doc.end()) {
            pc.gravity.dead = detail::get_or(*l, "dead_npm2", pc.gravity.dead);
            pc.gravity.live = detail::get_or(*l, "live_npm2", pc.gravity.live);
            pc.gravity.roof_live = detail::get_or(*l, "roof_live_npm2", pc.gravity.roof_live);
            trib = detail::get_or(*l, "tributary_width_m", trib);
            pc.seismic_includes_live = detail::get_or(*l, "seismic_includes_live", false);
            if (auto s = l->find("seismic"); s != l->end()) {
                pc.seismic.A = detail::get_or(*s, "A", pc.seismic.A);
                pc.seismic.B = detail::get_or(*s, "B", pc.seismic.B);
                pc.seismic.I = detail::get_or(*s, "I", pc.seismic.I);
                pc.seismic.R = detail::get_or(*s, "R", pc.seismic.R);
            }
            if (auto c = l->find("combination"); c != l->end()) {
                pc.factors.gravity = detail::get_or(*c, "gravity", pc.factors.gravity);
                pc.factors.seismic = detail::get_or(*c, "seismic", pc.factors.seismic);
            }
        }
        pc.gravity.tributary_width = trib;
        pc.gravity.validate();
        pc.seismic.validate();

        if (auto l = doc.find("limits"); l != doc.end()) {
            pc.limits.drift_denominator = detail::get_or(*l, "drift_denominator", pc.limits.drift_denominator);
            pc.limits.fy = detail::get_or(*l, "fy_pa", pc.limits.fy);
            pc.limits.transient_increase = detail::get_or(*l, "transient_increase", pc.limits.transient_increase);
            auto axis = detail::get_or<std::string>(*l, "column_axis", "minor");
            if (axis == "minor") pc.limits.column_axis = BucklingAxis::Minor;
            else if (axis == "major") pc.limits.column_axis = BucklingAxis::Major;
            else throw ValidationError("limits: column_axis must be minor or major");
        }
        if (!(pc.limits.drift_denominator > 0.0) || !(pc.limits.fy > 0.0) || !(pc.limits.transient_increase >= 1.0))
            throw ValidationError("limits must be positive");

        if (auto f = doc.find("fuzzy"); f != doc.end()) detail::parse_fuzzy(*f, pc.fuzzy);
        if (auto g = doc.find("ga"); g != doc.end()) detail::parse_ga(*g, pc.ga);

        pc.frame = detail::parse_frame(doc, catalog, trib);

        if (auto d = doc.find("design"); d != doc.end()) {
            pc.design = d->get<std::map<std::string, std::string>>();
            apply_design(*pc.frame, *pc.design); // validates
        }
        return pc;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid config: ") + e.what());
    }
}

/// Parses and builds from JSON text.
inline ProblemConfig parse_problem(std::string_view text, const SectionCatalog& catalog) {
    return build_problem(parse_document(text), catalog);
}

/// Frame-only entry point.
inline std::shared_ptr<const Frame> build_frame(const json& doc, const SectionCatalog& catalog) {
    return build_problem(doc, catalog).frame;
}

} // namespace semirigid
