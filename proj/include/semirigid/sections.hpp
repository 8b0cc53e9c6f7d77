#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "semirigid/error.hpp"
#include "semirigid/units.hpp"

namespace semirigid {

enum class LengthUnit { Inch, Meter };

/// One W-shape. All properties are SI.
struct Section {
    std::string name;
    double area = 0.0;                     // m^2
    double depth = 0.0;                    // m
    double moment_of_inertia_major = 0.0;  // m^4
    double section_modulus_major = 0.0;    // m^3
    double radius_of_gyration_minor = 0.0; // m
    double flange_width = 0.0;             // m
    double flange_thickness = 0.0;         // m
    double unit_weight_per_length = 0.0;   // N/m
    LengthUnit source_units = LengthUnit::Meter;

    friend bool operator==(const Section&, const Section&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(const std::string& text, std::size_t row, std::string_view column) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        throw ValidationError(fmt::format("catalog row {}: column '{}' is not a number: '{}'", row, column, text));
    return value;
}

/// "w16x26" -> "W16X26"
inline std::string normalize_name(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

/// Nominal depth of a W-shape label ("W16X26" -> 16); 0 when the label does not parse.
inline int nominal_depth(std::string_view name) {
    auto s = normalize_name(name);
    if (s.size() < 2 || s[0] != 'W') return 0;
    int depth = 0;
    std::from_chars(s.data() + 1, s.data() + s.size(), depth);
    return depth;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace detail

/// Immutable, ordered section list. Ordering: nominal depth ascending,
/// then area ascending, so chromosome indices decode stably.
class SectionCatalog {
public:
    SectionCatalog() = default;

    explicit SectionCatalog(std::vector<Section> sections) : entries_(std::move(sections)) {
        std::stable_sort(entries_.begin(), entries_.end(), [](const Section& a, const Section& b) {
            int da = detail::nominal_depth(a.name);
            int db = detail::nominal_depth(b.name);
            if (da != db) return da < db;
            return a.area < b.area;
        });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            auto key = detail::normalize_name(entries_[i].name);
            if (!index_.emplace(key, i).second)
                throw ValidationError("duplicate section name '" + entries_[i].name + "'");
        }
    }

    const std::vector<Section>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const Section& operator[](std::size_t i) const { return entries_.at(i); }

    /// Position of a section in catalog order.
    std::size_t position(std::string_view name) const {
        auto it = index_.find(detail::normalize_name(name));
        if (it == index_.end()) throw not_found(name);
        return it->second;
    }

    const Section& lookup(std::string_view name) const { return entries_[position(name)]; }

    bool contains(std::string_view name) const { return index_.count(detail::normalize_name(name)) > 0; }

    /// Up to `count` catalog names closest to `name` by edit distance.
    std::vector<std::string> nearest(std::string_view name, std::size_t count = 3) const {
        auto key = detail::normalize_name(name);
        std::vector<std::pair<std::size_t, std::size_t>> scored;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            scored.emplace_back(detail::edit_distance(key, detail::normalize_name(entries_[i].name)), i);
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::string> out;
        for (std::size_t i = 0; i < scored.size() && i < count; ++i) out.push_back(entries_[scored[i].second].name);
        return out;
    }

private:
    NotFoundError not_found(std::string_view name) const {
        std::string msg = "unknown section '" + std::string(name) + "'";
        auto near = nearest(name);
        if (!near.empty()) {
            msg += "; nearest:";
            for (const auto& n : near) msg += " " + n;
        }
        return NotFoundError(msg);
    }

    std::vector<Section> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::array<std::string_view, 9> catalog_columns = {"name", "units", "area", "depth", "Ix",
                                                                    "Sx",   "ry",    "bf",   "tf"};

/// Parses the catalog CSV (`name,units,area,depth,Ix,Sx,ry,bf,tf`).
/// Rows in `in` are converted to SI with 1 in = 0.0254 m.
inline SectionCatalog load_catalog(std::string_view csv_content) {
    std::istringstream in{std::string(csv_content)};
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        header = detail::split_csv_line(line);
        break;
    }
    if (header.empty()) throw ValidationError("catalog: missing header row");

    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
    for (auto name : catalog_columns)
        if (column.find(name) == column.end())
            throw ValidationError(fmt::format("catalog: missing required column '{}'", name));

    std::vector<Section> rows;
    std::map<std::string, std::size_t> seen;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        ++row;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw ValidationError(fmt::format("catalog row {} (line {}): expected {} fields, got {}", row, line_no,
                                              header.size(), cells.size()));
        auto cell = [&](std::string_view name) -> const std::string& { return cells[column.find(name)->second]; };

        Section s;
        s.name = cell("name");
        if (s.name.empty()) throw ValidationError(fmt::format("catalog row {}: empty name", row));
        auto key = detail::normalize_name(s.name);
        if (auto [it, fresh] = seen.emplace(key, row); !fresh)
            throw ValidationError(
                fmt::format("catalog row {}: duplicate name '{}' (first seen in row {})", row, s.name, it->second));

        const auto& unit = cell("units");
        double len = 0.0;
        if (unit == "in") {
            len = units::inch;
            s.source_units = LengthUnit::Inch;
        } else if (unit == "m") {
            len = 1.0;
            s.source_units = LengthUnit::Meter;
        } else {
            throw ValidationError(fmt::format("catalog row {}: units must be 'in' or 'm', got '{}'", row, unit));
        }

        auto positive = [&](std::string_view name) {
            double v = detail::parse_double(cell(name), row, name);
            if (!(v > 0.0))
                throw ValidationError(fmt::format("catalog row {} ('{}'): {} must be positive, got {}", row, s.name,
                                                  name, cell(name)));
            return v;
        };
        s.area = positive("area") * len * len;
        s.depth = positive("depth") * len;
        s.moment_of_inertia_major = positive("Ix") * len * len * len * len;
        s.section_modulus_major = positive("Sx") * len * len * len;
        s.radius_of_gyration_minor = positive("ry") * len;
        s.flange_width = positive("bf") * len;
        s.flange_thickness = positive("tf") * len;
        s.unit_weight_per_length = s.area * units::steel_unit_weight;

        // Tabulated Sx is rounded to three figures, so allow 1% over Ix/(d/2).
        double elastic = s.moment_of_inertia_major / (s.depth / 2.0);
        if (s.section_modulus_major > elastic * (1.0 + 1e-2))
            throw ValidationError(fmt::format("catalog row {} ('{}'): Sx exceeds Ix/(d/2)", row, s.name));

        rows.push_back(std::move(s));
    }
    return SectionCatalog(std::move(rows));
}

inline SectionCatalog load_catalog_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open catalog file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return load_catalog(ss.str());
}

/// Writes the catalog in SI units. Values use shortest round-trip formatting,
/// so load_catalog(serialize_catalog(c)) reproduces every double exactly.
inline std::string serialize_catalog(const SectionCatalog& catalog) {
    std::string out = "name,units,area,depth,Ix,Sx,ry,bf,tf\n";
    for (const auto& s : catalog.entries()) {
        out += fmt::format("{},m,{},{},{},{},{},{},{}\n", s.name, s.area, s.depth, s.moment_of_inertia_major,
                           s.section_modulus_major, s.radius_of_gyration_minor, s.flange_width, s.flange_thickness);
    }
    return out;
}

/// Either an explicit list of section names or the whole catalog.
struct AllSections {};
using PoolSpec = std::variant<AllSections, std::vector<std::string>>;

struct CandidatePool {
    std::vector<Section> sections;
    std::vector<std::string> warnings;
};

/// Resolves a pool spec against the catalog. The result follows catalog order;
/// repeated names are dropped with a warning.
inline CandidatePool candidate_pool(const SectionCatalog& catalog, const PoolSpec& spec) {
    CandidatePool pool;
    if (std::holds_alternative<AllSections>(spec)) {
        pool.sections = catalog.entries();
    } else {
        const auto& names = std::get<std::vector<std::string>>(spec);
        std::vector<std::size_t> positions;
        for (const auto& n : names) {
            auto p = catalog.position(n);
            if (std::find(positions.begin(), positions.end(), p) != positions.end()) {
                pool.warnings.push_back("duplicate pool entry '" + n + "' ignored");
                continue;
            }
            positions.push_back(p);
        }
        std::sort(positions.begin(), positions.end());
        for (auto p : positions) pool.sections.push_back(catalog[p]);
    }
    if (pool.sections.empty()) throw ValidationError("candidate pool is empty");
    return pool;
}

} // namespace semirigid
