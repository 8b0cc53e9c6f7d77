#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "semirigid/error.hpp"
#include "semirigid/sections.hpp"
#include "semirigid/units.hpp"

namespace semirigid {

struct Node {
    std::size_t id = 0;
    double x = 0.0; // m
    double y = 0.0; // m
};

enum class ConnectionKind { Rigid, Pinned, SemiRigid };

/// Beam-end joint. `k_rot` (N*m/rad) is meaningful only for SemiRigid.
struct ConnectionModel {
    ConnectionKind kind = ConnectionKind::Rigid;
    double k_rot = 0.0;

    static ConnectionModel rigid() { return {}; }
    static ConnectionModel pinned() { return {ConnectionKind::Pinned, 0.0}; }
    static ConnectionModel semi_rigid(double k) {
        if (!(k > 0.0) || !std::isfinite(k))
            throw ValidationError(fmt::format("semi-rigid connection stiffness must be positive, got {}", k));
        return {ConnectionKind::SemiRigid, k};
    }

    friend bool operator==(const ConnectionModel&, const ConnectionModel&) = default;
};

enum class MemberRole { Beam, Column };

struct Member {
    std::size_t id = 0;
    std::size_t node_a = 0;
    std::size_t node_b = 0;
    MemberRole role = MemberRole::Beam;
    std::size_t group = 0;
    ConnectionModel end_a;
    ConnectionModel end_b;
    double length = 0.0; // filled in by Frame
    double cos = 1.0;    // direction cosines a -> b
    double sin = 0.0;
};

enum class Fixity { Fixed, Pinned };

struct Support {
    std::size_t node = 0;
    Fixity fixity = Fixity::Fixed;
};

struct DesignGroup {
    std::size_t id = 0;
    std::string label;
    MemberRole role = MemberRole::Beam;
    std::vector<Section> pool;
};

/// Validated, immutable frame topology.
class Frame {
public:
    Frame(std::vector<Node> nodes, std::vector<Member> members, std::vector<Support> supports,
          std::vector<DesignGroup> groups, double tributary_width = 5.0)
        : nodes_(std::move(nodes)), members_(std::move(members)), supports_(std::move(supports)),
          groups_(std::move(groups)), tributary_width_(tributary_width) {
        validate();
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Member>& members() const noexcept { return members_; }
    const std::vector<Support>& supports() const noexcept { return supports_; }
    const std::vector<DesignGroup>& groups() const noexcept { return groups_; }
    double tributary_width() const noexcept { return tributary_width_; }

    std::optional<std::size_t> group_index(std::string_view label) const {
        for (const auto& g : groups_)
            if (g.label == label) return g.id;
        return std::nullopt;
    }

    /// Distinct node elevations above the lowest one, ascending (one per floor).
    std::vector<double> floor_levels() const {
        std::vector<double> ys;
        for (const auto& n : nodes_) ys.push_back(n.y);
        std::sort(ys.begin(), ys.end());
        std::vector<double> levels;
        for (double y : ys)
            if (levels.empty() || y - levels.back() > level_tolerance) levels.push_back(y);
        if (!levels.empty()) levels.erase(levels.begin());
        return levels;
    }

    double base_level() const {
        double lo = nodes_.front().y;
        for (const auto& n : nodes_) lo = std::min(lo, n.y);
        return lo;
    }

    double height() const {
        double hi = nodes_.front().y;
        for (const auto& n : nodes_) hi = std::max(hi, n.y);
        return hi - base_level();
    }

    /// Index into floor_levels() for a node elevation, or nullopt at the base.
    std::optional<std::size_t> floor_of(double y) const {
        auto levels = floor_levels();
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (std::abs(levels[i] - y) <= level_tolerance) return i;
        return std::nullopt;
    }

    static constexpr double level_tolerance = 1e-6;

private:
    void validate() {
        if (nodes_.empty()) throw ValidationError("frame has no nodes");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].id != i)
                throw ValidationError(fmt::format("node ids must be dense 0..n-1; position {} has id {}", i, nodes_[i].id));
            if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].y))
                throw ValidationError(fmt::format("node {} has non-finite coordinates", i));
        }
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            if (groups_[i].id != i) throw ValidationError("group ids must be dense 0..n-1");
            if (groups_[i].pool.empty())
                throw ValidationError("group '" + groups_[i].label + "' has an empty section pool");
        }
        for (auto& m : members_) {
            if (m.node_a >= nodes_.size() || m.node_b >= nodes_.size())
                throw ValidationError(fmt::format("member {} references a missing node", m.id));
            if (m.node_a == m.node_b) throw ValidationError(fmt::format("member {} starts and ends at node {}", m.id, m.node_a));
            if (m.group >= groups_.size()) throw ValidationError(fmt::format("member {} references a missing group", m.id));
            double dx = nodes_[m.node_b].x - nodes_[m.node_a].x;
            double dy = nodes_[m.node_b].y - nodes_[m.node_a].y;
            m.length = std::hypot(dx, dy);
            if (!(m.length > 0.0)) throw ValidationError(fmt::format("member {} has zero length", m.id));
            m.cos = dx / m.length;
            m.sin = dy / m.length;
            for (const auto* c : {&m.end_a, &m.end_b})
                if (c->kind == ConnectionKind::SemiRigid && !(c->k_rot > 0.0))
                    throw ValidationError(fmt::format("member {} has a non-positive connection stiffness", m.id));
        }
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (members_[i].id != i) throw ValidationError("member ids must be dense 0..n-1");
        if (supports_.empty()) throw ValidationError("frame has no supports");
        for (const auto& s : supports_)
            if (s.node >= nodes_.size()) throw ValidationError(fmt::format("support references missing node {}", s.node));
        if (!(tributary_width_ >= 0.0)) throw ValidationError("tributary width must be non-negative");
    }

    std::vector<Node> nodes_;
    std::vector<Member> members_;
    std::vector<Support> supports_;
    std::vector<DesignGroup> groups_;
    double tributary_width_;
};

/// Pool index per group.
using Assignment = std::vector<std::size_t>;

/// A frame with a section bound to every group. Holds a non-owning pointer;
/// the frame must outlive it.
class SizedFrame {
public:
    SizedFrame(const Frame& frame, Assignment assignment) : frame_(&frame), assignment_(std::move(assignment)) {}

    const Frame& frame() const noexcept { return *frame_; }
    const Assignment& assignment() const noexcept { return assignment_; }

    const Section& group_section(std::size_t group) const {
        return frame_->groups()[group].pool[assignment_[group]];
    }
    const Section& member_section(const Member& m) const { return group_section(m.group); }

    friend bool operator==(const SizedFrame& a, const SizedFrame& b) {
        return a.frame_ == b.frame_ && a.assignment_ == b.assignment_;
    }

private:
    const Frame* frame_;
    Assignment assignment_;
};

inline SizedFrame apply_design(const Frame& frame, const Assignment& assignment) {
    if (assignment.size() != frame.groups().size())
        throw ValidationError(fmt::format("design assigns {} groups, frame has {}", assignment.size(), frame.groups().size()));
    for (std::size_t g = 0; g < assignment.size(); ++g)
        if (assignment[g] >= frame.groups()[g].pool.size())
            throw ValidationError(fmt::format("group '{}': pool index {} out of range (pool size {})",
                                              frame.groups()[g].label, assignment[g], frame.groups()[g].pool.size()));
    return SizedFrame(frame, assignment);
}

/// Binds sections by name: label -> section name. Every group must be present
/// and each section must belong to that group's pool.
inline SizedFrame apply_design(const Frame& frame, const std::map<std::string, std::string>& by_label) {
    Assignment a(frame.groups().size());
    for (const auto& g : frame.groups()) {
        auto it = by_label.find(g.label);
        if (it == by_label.end()) throw ValidationError("design is missing group '" + g.label + "'");
        auto key = detail::normalize_name(it->second);
        auto pos = std::find_if(g.pool.begin(), g.pool.end(),
                                [&](const Section& s) { return detail::normalize_name(s.name) == key; });
        if (pos == g.pool.end())
            throw ValidationError("section '" + it->second + "' is not in the pool of group '" + g.label + "'");
        a[g.id] = static_cast<std::size_t>(pos - g.pool.begin());
    }
    for (const auto& [label, _] : by_label)
        if (!frame.group_index(label)) throw ValidationError("design names unknown group '" + label + "'");
    return SizedFrame(frame, std::move(a));
}

/// Sum of area * length * unit weight over all members, N.
inline double frame_weight(const SizedFrame& sized, double unit_weight = units::steel_unit_weight) {
    double w = 0.0;
    for (const auto& m : sized.frame().members()) w += sized.member_section(m).area * m.length * unit_weight;
    return w;
}

/// Regular rectangular frame: (bays+1) column lines, (stories+1) levels,
/// base nodes supported. Members are created without groups (group 0).
struct GridSpec {
    std::size_t bays = 1;
    double bay_m = 5.0;
    std::size_t stories = 1;
    double story_m = 3.2;
    ConnectionModel beam_connection;
    ConnectionModel column_connection;
    Fixity base = Fixity::Fixed;
};

/// Selects grid members for a group. Story numbers are 1-based and inclusive.
struct GroupRule {
    std::string label;
    MemberRole role = MemberRole::Beam;
    std::size_t story_from = 1;
    std::size_t story_to = 1;
    enum class Lines { All, Exterior, Interior } lines = Lines::All;
    PoolSpec pool = AllSections{};
};

/// Node id at column line `i`, level `j` of a grid.
inline std::size_t grid_node(const GridSpec& g, std::size_t line, std::size_t level) {
    return level * (g.bays + 1) + line;
}

inline Frame grid_frame(const GridSpec& spec, const std::vector<GroupRule>& rules, const SectionCatalog& catalog,
                        double tributary_width = 5.0) {
    if (spec.bays == 0 || spec.stories == 0) throw ValidationError("grid needs at least one bay and one story");
    if (!(spec.bay_m > 0.0) || !(spec.story_m > 0.0)) throw ValidationError("grid dimensions must be positive");

    std::vector<Node> nodes;
    for (std::size_t j = 0; j <= spec.stories; ++j)
        for (std::size_t i = 0; i <= spec.bays; ++i)
            nodes.push_back({nodes.size(), static_cast<double>(i) * spec.bay_m, static_cast<double>(j) * spec.story_m});

    std::vector<DesignGroup> groups;
    for (const auto& r : rules) {
        if (r.story_from < 1 || r.story_to < r.story_from || r.story_to > spec.stories)
            throw ValidationError("group '" + r.label + "' has an invalid story range");
        groups.push_back({groups.size(), r.label, r.role, candidate_pool(catalog, r.pool).sections});
    }

    auto find_group = [&](MemberRole role, std::size_t story, std::size_t line) -> std::size_t {
        bool exterior = line == 0 || line == spec.bays;
        for (std::size_t k = 0; k < rules.size(); ++k) {
            const auto& r = rules[k];
            if (r.role != role || story < r.story_from || story > r.story_to) continue;
            if (role == MemberRole::Column) {
                if (r.lines == GroupRule::Lines::Exterior && !exterior) continue;
                if (r.lines == GroupRule::Lines::Interior && exterior) continue;
            }
            return k;
        }
        throw ValidationError(fmt::format("no group covers {} at story {}, line {}",
                                          role == MemberRole::Beam ? "beam" : "column", story, line));
    };

    std::vector<Member> members;
    for (std::size_t s = 1; s <= spec.stories; ++s) {
        for (std::size_t i = 0; i <= spec.bays; ++i) {
            Member m;
            m.id = members.size();
            m.node_a = grid_node(spec, i, s - 1);
            m.node_b = grid_node(spec, i, s);
            m.role = MemberRole::Column;
            m.group = find_group(MemberRole::Column, s, i);
            m.end_a = m.end_b = spec.column_connection;
            members.push_back(m);
        }
        for (std::size_t i = 0; i < spec.bays; ++i) {
            Member m;
            m.id = members.size();
            m.node_a = grid_node(spec, i, s);
            m.node_b = grid_node(spec, i + 1, s);
            m.role = MemberRole::Beam;
            m.group = find_group(MemberRole::Beam, s, i);
            m.end_a = m.end_b = spec.beam_connection;
            members.push_back(m);
        }
    }

    std::vector<Support> supports;
    for (std::size_t i = 0; i <= spec.bays; ++i) supports.push_back({grid_node(spec, i, 0), spec.base});

    return Frame(std::move(nodes), std::move(members), std::move(supports), std::move(groups), tributary_width);
}

/// Copy of `frame` with every beam end replaced by `conn`.
inline Frame with_beam_connections(const Frame& frame, const ConnectionModel& conn) {
    auto members = frame.members();
    for (auto& m : members)
        if (m.role == MemberRole::Beam) m.end_a = m.end_b = conn;
    return Frame(frame.nodes(), std::move(members), frame.supports(), frame.groups(), frame.tributary_width());
}

} // namespace semirigid
