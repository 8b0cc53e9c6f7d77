#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semirigid/bench.hpp"
#include "semirigid/config.hpp"
#include "semirigid/optimizer.hpp"

#ifndef SEMIRIGID_DEFAULT_CATALOG
#define SEMIRIGID_DEFAULT_CATALOG "data/w_shapes.csv"
#endif

namespace semirigid::cli {

enum ExitCode : int { Ok = 0, ToleranceFailure = 1, Invalid = 2, Unstable = 3 };

inline std::string catalog_path() {
    if (const char* env = std::getenv("SEMIRIGID_CATALOG"); env && *env) return env;
    return SEMIRIGID_DEFAULT_CATALOG;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

/// Problem source: a benchmark name or a path to a JSON config.
struct ProblemOptions {
    std::string problem;
    std::optional<std::string> connection;
};

inline bool is_benchmark_name(const std::string& s) {
    return s == "frame3" || s == "frame5" || s == "frame9" || s == "verify";
}

inline ProblemConfig load_problem(const ProblemOptions& opt, const SectionCatalog& catalog) {
    if (opt.problem.empty()) throw ValidationError("missing benchmark name or config path");
    if (is_benchmark_name(opt.problem)) {
        auto id = bench::parse_benchmark(opt.problem);
        auto variant = bench::parse_variant(opt.connection.value_or("rigid"));
        return bench::benchmark(id, variant, catalog);
    }
    if (!std::filesystem::exists(opt.problem))
        throw ValidationError("'" + opt.problem + "' is neither a benchmark (frame3, frame5, frame9, verify) nor a config file");
    auto pc = parse_problem(read_file(opt.problem), catalog);
    if (opt.connection) {
        auto conn = bench::connection_model(bench::parse_variant(*opt.connection));
        pc.frame = std::make_shared<const Frame>(with_beam_connections(*pc.frame, conn));
    }
    return pc;
}

inline json design_table(const Frame& frame, const Assignment& a) {
    json t = json::object();
    for (const auto& g : frame.groups()) t[g.label] = g.pool.at(a.at(g.id)).name;
    return t;
}

inline json report_json(const ConstraintReport& r) {
    return {{"stress_ratios", r.stress_ratios},
            {"drift_ratio", r.drift_ratio},
            {"aux_ratios", r.aux_ratios},
            {"worst", r.worst},
            {"feasible", r.feasible()}};
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    ProblemOptions source;
    std::optional<std::string> out_dir;
};

inline int cmd_analyze(const AnalyzeOptions& opt, const SectionCatalog& catalog, std::ostream& out, std::ostream& err) {
    try {
        auto pc = load_problem(opt.source, catalog);
        if (!pc.design) throw ValidationError("config has no 'design' to analyze");
        const Problem problem = pc.problem();
        const SizedFrame sized = apply_design(problem.frame(), *pc.design);
        const auto cases = problem.load_cases(sized);
        const auto results = assemble_and_solve(sized, cases, pc.modulus);
        const auto report = evaluate_constraints(sized, results, pc.limits, pc.modulus);

        static constexpr const char* case_names[] = {"gravity", "gravity+seismic(+x)", "gravity+seismic(-x)"};
        json doc;
        doc["name"] = pc.name;
        doc["design"] = design_table(problem.frame(), sized.assignment());
        const double weight = frame_weight(sized, pc.unit_weight);
        doc["weight_n"] = weight;
        doc["weight_t"] = units::to_tonnes(weight);
        json cj = json::array();
        double roof = 0.0;
        for (std::size_t c = 0; c < results.size(); ++c) {
            const auto& r = results[c];
            json e;
            e["name"] = c < 3 ? case_names[c] : fmt::format("case{}", c + 1);
            e["roof_displacement_m"] = roof_displacement(r, problem.frame());
            roof = std::max(roof, roof_displacement(r, problem.frame()));
            json d = json::array();
            for (std::size_t n = 0; n < r.displacements.size(); ++n)
                d.push_back({{"node", problem.frame().nodes()[n].id},
                             {"ux", r.displacements[n][0]},
                             {"uy", r.displacements[n][1]},
                             {"rz", r.displacements[n][2]}});
            e["displacements"] = d;
            json f = json::array();
            for (std::size_t m = 0; m < r.member_end_forces.size(); ++m) {
                const auto& v = r.member_end_forces[m];
                f.push_back({{"member", problem.frame().members()[m].id},
                             {"end_a", {v(0), v(1), v(2)}},
                             {"end_b", {v(3), v(4), v(5)}}});
            }
            e["member_end_forces"] = f;
            json re = json::array();
            for (const auto& [node, rv] : r.reactions) re.push_back({{"node", node}, {"force", rv}});
            e["reactions"] = re;
            cj.push_back(e);
        }
        doc["roof_displacement_m"] = roof;
        doc["combinations"] = cj;
        doc["constraints"] = report_json(report);

        const std::string text = doc.dump(2) + "\n";
        if (opt.out_dir) {
            write_atomic(std::filesystem::path(*opt.out_dir) / "analysis.json", text);
            out << fmt::format("{}: weight {:.4f} t, roof displacement {:.3f} cm, worst ratio {:.4f} ({})\n", pc.name,
                               units::to_tonnes(weight), roof * 100.0, report.worst,
                               report.feasible() ? "feasible" : "infeasible");
        } else {
            out << text;
        }
        return Ok;
    } catch (const UnstableStructure& e) {
        err << "error: " << e.what() << "\n";
        return Unstable;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }
}

// ---------------------------------------------------------------------------

struct OptimizeOptions {
    ProblemOptions source;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> population;
    std::optional<double> mutation;
    std::optional<std::string> fuzzy_shape;
    std::optional<std::string> fitness;
    std::optional<std::string> selection;
    std::size_t jobs = 1;
    std::string out_dir = "out";
};

inline std::string history_file_name(std::size_t restart) { return fmt::format("history_{:02}.csv", restart + 1); }

inline json optimization_json(const ProblemConfig& pc, const Problem& problem, const OptimizationRun& run) {
    json doc;
    doc["name"] = pc.name;
    doc["fuzzy_shape"] = std::string(fuzzy::to_string(run.scheme.objective.shape));
    doc["fitness"] = std::string(fuzzy::to_string(run.scheme.mode));
    doc["population"] = run.config.population_size;
    doc["generations"] = run.config.max_generations;
    doc["mutation_rate"] = run.config.mutation_rate;
    doc["elite_count"] = run.config.elite_count();
    doc["selection"] = std::string(to_string(run.config.selection));
    doc["objective_bounds_n"] = {run.scheme.objective.f_lower, run.scheme.objective.f_upper, run.scheme.objective.f_max};
    if (run.pilot) {
        doc["pilot"] = {{"weight_n", run.pilot->weight},
                        {"feasible", run.pilot->feasible},
                        {"design", design_table(problem.frame(), run.pilot->design)}};
    }

    auto entry = [&](const RunHistory& h, std::size_t k) {
        const auto a = problem.analyze(h.best.assignment);
        return json{{"restart", k + 1},
                    {"seed", h.seed},
                    {"history", history_file_name(k)},
                    {"feasible", h.found_feasible},
                    {"weight_n", h.best.weight},
                    {"weight_t", units::to_tonnes(h.best.weight)},
                    {"lambda", h.best.lambda},
                    {"worst_ratio", h.best.worst},
                    {"roof_displacement_m", a.roof_displacement},
                    {"evaluations", h.evaluations},
                    {"design", design_table(problem.frame(), h.best.assignment)}};
    };
    json rs = json::array();
    for (std::size_t k = 0; k < run.restarts.size(); ++k) rs.push_back(entry(run.restarts[k], k));
    doc["restarts"] = rs;
    doc["best"] = entry(run.restarts[run.best_restart], run.best_restart);
    return doc;
}

inline int cmd_optimize(const OptimizeOptions& opt, const SectionCatalog& catalog, std::ostream& out, std::ostream& err) {
    try {
        if (opt.source.problem == "verify") throw ValidationError("the verification beam has nothing to optimize; use 'verify'");
        auto pc = load_problem(opt.source, catalog);
        GAConfig ga = pc.ga;
        if (opt.seed) ga.seed = *opt.seed;
        if (opt.restarts) ga.restarts = *opt.restarts;
        if (opt.generations) ga.max_generations = *opt.generations;
        if (opt.population) ga.population_size = *opt.population;
        if (opt.mutation) ga.mutation_rate = *opt.mutation;
        if (opt.selection) ga.selection = parse_selection(*opt.selection);
        ga.jobs = std::max<std::size_t>(opt.jobs, 1);
        ga.validate();
        FuzzyConfig fz = pc.fuzzy;
        if (opt.fuzzy_shape) fz.shape = fuzzy::parse_shape(*opt.fuzzy_shape);
        if (opt.fitness) fz.mode = fuzzy::parse_fitness_mode(*opt.fitness);

        const Problem problem = pc.problem();
        const auto result = run(problem, ga, fz);

        const std::filesystem::path dir(opt.out_dir);
        std::string log;
        for (std::size_t k = 0; k < result.restarts.size(); ++k) {
            const auto& h = result.restarts[k];
            write_atomic(dir / history_file_name(k), history_csv(h));
            log += fmt::format("restart {:2} seed {:>6}: {} weight {:.4f} t, lambda {:.4f}, {} evaluations\n", k + 1,
                               h.seed, h.found_feasible ? "feasible  " : "infeasible", units::to_tonnes(h.best.weight),
                               h.best.lambda, h.evaluations);
        }
        const auto doc = optimization_json(pc, problem, result);
        write_atomic(dir / "result.json", doc.dump(2) + "\n");
        write_atomic(dir / "run.log", log);

        out << log;
        const auto& best = result.restarts[result.best_restart];
        out << fmt::format("best: restart {} ({}), {:.4f} t\n", result.best_restart + 1,
                           best.found_feasible ? "feasible" : "no feasible design found", units::to_tonnes(best.best.weight));
        for (const auto& g : problem.frame().groups())
            out << fmt::format("  {:<4} {}\n", g.label, g.pool.at(best.best.assignment.at(g.id)).name);
        out << "artifacts in " << dir.string() << "\n";
        return Ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
    bench::VerificationParams params;
};

inline int cmd_verify(const VerifyOptions& opt, const SectionCatalog& catalog, std::ostream& out, std::ostream& err) {
    try {
        auto report = bench::run_verification(catalog, opt.params);
        out << bench::format_verification(report, opt.params);
        return report.pass() ? Ok : ToleranceFailure;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }
}

// ---------------------------------------------------------------------------

inline std::string describe_section(const Section& s) {
    const double in = units::inch;
    std::string o;
    o += fmt::format("{}\n", s.name);
    o += fmt::format("  area        {:.6e} m^2    {:.4g} in^2\n", s.area, s.area / (in * in));
    o += fmt::format("  depth       {:.6e} m      {:.4g} in\n", s.depth, s.depth / in);
    o += fmt::format("  Ix          {:.6e} m^4    {:.4g} in^4\n", s.moment_of_inertia_major, s.moment_of_inertia_major / std::pow(in, 4));
    o += fmt::format("  Sx          {:.6e} m^3    {:.4g} in^3\n", s.section_modulus_major, s.section_modulus_major / std::pow(in, 3));
    o += fmt::format("  ry          {:.6e} m      {:.4g} in\n", s.radius_of_gyration_minor, s.radius_of_gyration_minor / in);
    o += fmt::format("  bf          {:.6e} m      {:.4g} in\n", s.flange_width, s.flange_width / in);
    o += fmt::format("  tf          {:.6e} m      {:.4g} in\n", s.flange_thickness, s.flange_thickness / in);
    o += fmt::format("  weight      {:.6g} N/m\n", s.unit_weight_per_length);
    return o;
}

inline int cmd_catalog(const std::string& action, const std::string& name, const SectionCatalog& catalog,
                       std::ostream& out, std::ostream& err) {
    try {
        if (action == "list") {
            out << fmt::format("{:<10} {:>12} {:>10} {:>12} {:>10}\n", "name", "area (m^2)", "depth (m)", "Ix (m^4)",
                               "w (N/m)");
            for (const auto& s : catalog.entries())
                out << fmt::format("{:<10} {:>12.4e} {:>10.4f} {:>12.4e} {:>10.1f}\n", s.name, s.area, s.depth,
                                   s.moment_of_inertia_major, s.unit_weight_per_length);
            out << catalog.size() << " sections\n";
            return Ok;
        }
        if (action == "show") {
            if (name.empty()) throw ValidationError("catalog show needs a section name");
            out << describe_section(catalog.lookup(name));
            return Ok;
        }
        throw ValidationError("unknown catalog action '" + action + "' (expected list, show)");
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }
}

// ---------------------------------------------------------------------------

/// Full command-line entry point; returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Weight optimization of steel frames with semi-rigid connections"};
    app.require_subcommand(1);

    AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze", "Analyze a benchmark or config design");
    analyze->add_option("problem", an.source.problem, "frame3|frame5|frame9|verify or a JSON config path")->required();
    analyze->add_option("--connection", an.source.connection, "Beam connection: rigid, 1, 4, 5, 7");
    analyze->add_option("--out", an.out_dir, "Write analysis.json into DIR");

    OptimizeOptions op;
    auto* optimize = app.add_subcommand("optimize", "Run the genetic algorithm");
    optimize->add_option("problem", op.source.problem, "frame3|frame5|frame9 or a JSON config path")->required();
    optimize->add_option("--connection", op.source.connection, "Beam connection: rigid, 1, 4, 5, 7");
    optimize->add_option("--seed", op.seed, "Base seed");
    optimize->add_option("--restarts", op.restarts, "Independent runs (seeds seed, seed+1, ...)");
    optimize->add_option("--generations", op.generations, "Generations per run");
    optimize->add_option("--population", op.population, "Population size");
    optimize->add_option("--mutation", op.mutation, "Per-bit mutation probability");
    optimize->add_option("--fuzzy-shape", op.fuzzy_shape, "crisp, linear or bilinear");
    optimize->add_option("--fitness", op.fitness, "lambda or phi");
    optimize->add_option("--selection", op.selection, "uniform or tournament2");
    optimize->add_option("--jobs", op.jobs, "Parallel fitness evaluations");
    optimize->add_option("--out", op.out_dir, "Artifact directory")->capture_default_str();

    VerifyOptions vf;
    auto* verify = app.add_subcommand("verify", "Check the semi-rigid element against its oracle");
    verify->add_option("--span", vf.params.span, "Beam span, m")->capture_default_str();
    verify->add_option("--load", vf.params.w, "Uniform load, N/m")->capture_default_str();
    verify->add_option("--perturb", vf.params.perturbation, "Test hook: relative skew of the closed-form constant")
        ->group("");

    std::string action;
    std::string section_name;
    auto* catalog_cmd = app.add_subcommand("catalog", "List or show catalog sections");
    catalog_cmd->add_option("action", action, "list or show")->required();
    catalog_cmd->add_option("name", section_name, "Section name for show");

    std::string bench_name;
    std::string bench_conn = "rigid";
    auto* config_cmd = app.add_subcommand("config", "Print a benchmark config document");
    config_cmd->add_option("benchmark", bench_name, "frame3, frame5 or frame9")->required();
    config_cmd->add_option("--connection", bench_conn, "Beam connection: rigid, 1, 4, 5, 7");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }

    try {
        if (config_cmd->parsed()) {
            auto doc = bench::benchmark_document(bench::parse_benchmark(bench_name), bench::parse_variant(bench_conn));
            out << doc.dump(2) << "\n";
            return Ok;
        }
        const auto catalog = load_catalog_file(catalog_path());
        if (analyze->parsed()) {
            if (an.source.problem == "verify") return cmd_verify(vf, catalog, out, err);
            return cmd_analyze(an, catalog, out, err);
        }
        if (optimize->parsed()) return cmd_optimize(op, catalog, out, err);
        if (verify->parsed()) return cmd_verify(vf, catalog, out, err);
        return cmd_catalog(action, section_name, catalog, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }
}

} // namespace semirigid::cli
