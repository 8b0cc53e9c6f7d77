#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "semirigid/error.hpp"
#include "semirigid/problem.hpp"

// Binary-coded genetic algorithm for discrete section sizing.
//
// Each generation: the best `ne` designs are copied unchanged, the other
// slots are filled with one-point-crossover children of parent pairs drawn
// at random from the whole population, every child bit is flipped with the
// mutation probability, and out-of-range group codes are wrapped modulo the
// pool size.
namespace semirigid {

/// Deterministic generator: mt19937_64 with portable uniform helpers, so a
/// seed reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

enum class Selection { Uniform, Tournament2 };

inline Selection parse_selection(std::string_view s) {
    if (s == "uniform") return Selection::Uniform;
    if (s == "tournament2") return Selection::Tournament2;
    throw ValidationError("unknown selection '" + std::string(s) + "' (expected uniform, tournament2)");
}

inline std::string_view to_string(Selection s) { return s == Selection::Uniform ? "uniform" : "tournament2"; }

struct GAConfig {
    std::size_t population_size = 30;
    double elitism_rate = 0.1;
    double mutation_rate = 0.005;
    std::size_t max_generations = 75;
    std::uint64_t seed = 1;
    std::size_t restarts = 1;
    Selection selection = Selection::Uniform;
    std::size_t jobs = 1;
    std::size_t init_attempts = 10; // random draws per initial individual while looking for a feasible one
    bool repair_initial = true;     // upsize the least violated draw when none was feasible

    void validate() const {
        if (population_size < 2) throw ValidationError("population size must be at least 2");
        if (!(elitism_rate >= 0.0 && elitism_rate <= 1.0)) throw ValidationError("elitism rate must lie in [0, 1]");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ValidationError("mutation rate must lie in [0, 1]");
        if (max_generations < 1) throw ValidationError("at least one generation is required");
        if (restarts < 1) throw ValidationError("at least one restart is required");
    }

    /// Elite count: round(population * rate), at least 1, adjusted so that the
    /// remaining slots pair up evenly.
    std::size_t elite_count() const {
        auto ne = static_cast<std::size_t>(std::llround(static_cast<double>(population_size) * elitism_rate));
        ne = std::clamp<std::size_t>(ne, 1, population_size);
        if ((population_size - ne) % 2 != 0) ne = ne > 1 ? ne - 1 : ne + 1;
        return ne;
    }
};

struct Chromosome {
    std::vector<std::uint8_t> bits;

    std::string key() const { return std::string(bits.begin(), bits.end()); }
    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Bit layout: one field of ceil(log2(pool size)) bits per group, MSB first.
class Encoding {
public:
    explicit Encoding(std::vector<std::size_t> pool_sizes) : pool_sizes_(std::move(pool_sizes)) {
        for (auto n : pool_sizes_) {
            if (n == 0) throw ValidationError("cannot encode an empty pool");
            std::size_t w = 0;
            while ((std::size_t{1} << w) < n) ++w;
            offsets_.push_back(length_);
            widths_.push_back(w);
            length_ += w;
        }
    }

    static Encoding for_frame(const Frame& frame) {
        std::vector<std::size_t> sizes;
        for (const auto& g : frame.groups()) sizes.push_back(g.pool.size());
        return Encoding(std::move(sizes));
    }

    std::size_t length() const noexcept { return length_; }
    std::size_t groups() const noexcept { return pool_sizes_.size(); }
    std::size_t width(std::size_t g) const { return widths_.at(g); }

    Chromosome encode(const Assignment& a) const {
        if (a.size() != pool_sizes_.size()) throw ValidationError("assignment size does not match encoding");
        Chromosome c;
        c.bits.assign(length_, 0);
        for (std::size_t g = 0; g < a.size(); ++g) {
            if (a[g] >= pool_sizes_[g]) throw ValidationError("pool index out of range");
            for (std::size_t b = 0; b < widths_[g]; ++b)
                c.bits[offsets_[g] + b] = static_cast<std::uint8_t>((a[g] >> (widths_[g] - 1 - b)) & 1U);
        }
        return c;
    }

    /// Raw field value (may exceed the pool size).
    std::size_t field(const Chromosome& c, std::size_t g) const {
        std::size_t v = 0;
        for (std::size_t b = 0; b < widths_[g]; ++b) v = (v << 1) | c.bits[offsets_[g] + b];
        return v;
    }

    /// Group indices with out-of-range fields wrapped modulo the pool size.
    Assignment decode(const Chromosome& c) const {
        if (c.bits.size() != length_) throw ValidationError("chromosome length does not match encoding");
        Assignment a(pool_sizes_.size());
        for (std::size_t g = 0; g < a.size(); ++g) a[g] = field(c, g) % pool_sizes_[g];
        return a;
    }

    /// Rewrites out-of-range fields with their wrapped value.
    void repair(Chromosome& c) const { c = encode(decode(c)); }

private:
    std::vector<std::size_t> pool_sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> widths_;
    std::size_t length_ = 0;
};

struct Individual {
    Chromosome chromosome;
    FitnessRecord record;
};

/// One-point crossover at `cut` (1 <= cut < length): C = A[:cut] + B[cut:],
/// D = B[:cut] + A[cut:].
inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, std::size_t cut) {
    Chromosome c = a;
    Chromosome d = b;
    for (std::size_t i = cut; i < a.bits.size(); ++i) std::swap(c.bits[i], d.bits[i]);
    return {std::move(c), std::move(d)};
}

/// Flips every bit independently with probability `rate`. Draws one number
/// per bit regardless of the outcome.
inline void mutate(Chromosome& c, double rate, Rng& rng) {
    for (auto& bit : c.bits)
        if (rng.uniform() < rate) bit ^= 1U;
}

namespace detail {

inline std::vector<std::size_t> ranking(const std::vector<Individual>& pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].record.fitness > pop[b].record.fitness; });
    return order;
}

inline std::size_t pick_parent(const std::vector<Individual>& pop, Selection sel, Rng& rng) {
    if (sel == Selection::Uniform) return rng.below(pop.size());
    auto a = rng.below(pop.size());
    auto b = rng.below(pop.size());
    return pop[b].record.fitness > pop[a].record.fitness ? b : a;
}

} // namespace detail

/// Produces the next (unevaluated) population from an evaluated one.
inline std::vector<Chromosome> step_generation(const std::vector<Individual>& population, const GAConfig& config,
                                               const Encoding& encoding, Rng& rng) {
    const std::size_t ne = std::min(config.elite_count(), population.size());
    const std::size_t nc = (config.population_size - ne) / 2;
    const std::size_t len = encoding.length();

    std::vector<Chromosome> next;
    next.reserve(config.population_size);
    auto order = detail::ranking(population);
    for (std::size_t i = 0; i < ne; ++i) next.push_back(population[order[i]].chromosome);

    for (std::size_t j = 0; j < nc; ++j) {
        std::size_t a = detail::pick_parent(population, config.selection, rng);
        std::size_t b = a;
        if (config.selection == Selection::Uniform) {
            b = rng.below(population.size() - 1);
            if (b >= a) ++b;
        } else {
            while (b == a) b = detail::pick_parent(population, config.selection, rng);
        }
        const std::size_t cut = len >= 2 ? 1 + rng.below(len - 1) : len;
        auto [c, d] = crossover(population[a].chromosome, population[b].chromosome, cut);
        for (auto* child : {&c, &d}) {
            mutate(*child, config.mutation_rate, rng);
            encoding.repair(*child);
            next.push_back(std::move(*child));
        }
    }
    return next;
}

struct GenerationRecord {
    std::size_t generation = 0;
    double best_weight = 0.0;        // N, best-fitness individual
    double best_lambda = 0.0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double best_so_far_weight = 0.0; // N, lightest feasible design so far (NaN if none yet)
};

struct RunHistory {
    std::uint64_t seed = 0;
    std::vector<GenerationRecord> generations;
    FitnessRecord best;     // lightest feasible, else highest fitness
    bool found_feasible = false;
    std::size_t evaluations = 0;
};

/// Outcome of the standard-GA run that sets the fuzzy objective bounds.
struct PilotResult {
    double weight = 0.0; // N, lightest feasible (or heaviest possible design when none was found)
    Assignment design;
    bool feasible = false;
};

struct OptimizationRun {
    GAConfig config;
    FitnessScheme scheme;
    std::vector<RunHistory> restarts;
    std::size_t best_restart = 0;
    std::optional<PilotResult> pilot;

    const FitnessRecord& best() const { return restarts.at(best_restart).best; }
};

/// Memoized, optionally parallel evaluation of chromosomes for one run.
class Evaluator {
public:
    Evaluator(const Problem& problem, const FitnessScheme& scheme, const Encoding& encoding, std::size_t jobs)
        : problem_(problem), scheme_(scheme), encoding_(encoding), jobs_(std::max<std::size_t>(jobs, 1)) {}

    FitnessRecord operator()(const Chromosome& c) {
        auto key = c.key();
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        auto rec = evaluate(encoding_.decode(c), problem_, scheme_);
        ++evaluations_;
        cache_.emplace(std::move(key), rec);
        return rec;
    }

    std::vector<Individual> batch(std::vector<Chromosome> chromosomes) {
        std::vector<Individual> out(chromosomes.size());
        std::vector<std::size_t> todo;
        std::unordered_map<std::string, std::size_t> first;
        for (std::size_t i = 0; i < chromosomes.size(); ++i) {
            out[i].chromosome = std::move(chromosomes[i]);
            auto key = out[i].chromosome.key();
            if (auto it = cache_.find(key); it != cache_.end()) {
                out[i].record = it->second;
            } else if (first.emplace(key, i).second) {
                todo.push_back(i);
            }
        }

        std::vector<FitnessRecord> fresh(todo.size());
        auto work = [&](std::size_t worker, std::size_t stride) {
            for (std::size_t k = worker; k < todo.size(); k += stride)
                fresh[k] = evaluate(encoding_.decode(out[todo[k]].chromosome), problem_, scheme_);
        };
        const std::size_t threads = std::min(jobs_, todo.size());
        if (threads <= 1) {
            work(0, 1);
        } else {
            std::vector<std::exception_ptr> errors(threads);
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        work(t, threads);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (std::size_t k = 0; k < todo.size(); ++k) {
            cache_.emplace(out[todo[k]].chromosome.key(), fresh[k]);
            ++evaluations_;
        }
        for (auto& ind : out)
            if (ind.record.assignment.empty()) ind.record = cache_.at(ind.chromosome.key());
        return out;
    }

    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    const Problem& problem_;
    const FitnessScheme& scheme_;
    const Encoding& encoding_;
    std::size_t jobs_;
    std::size_t evaluations_ = 0;
    std::unordered_map<std::string, FitnessRecord> cache_;
};

namespace detail {

inline bool better_feasible(const FitnessRecord& candidate, const FitnessRecord& incumbent) {
    return candidate.weight < incumbent.weight;
}

} // namespace detail

/// Greedy move toward feasibility: every group holding an overstressed member
/// (every group on a drift violation or instability) steps to its next larger
/// section by area, and a lower column group lighter than the group stacked on
/// it steps up too, or the upper one steps down once the lower one is maxed.
/// When none of those groups can grow, all groups that still can do.
/// Stops when feasible or after `max_steps` analyses.
inline Assignment upsize_repair(Assignment a, const Problem& problem, std::size_t max_steps = 200) {
    const Frame& frame = problem.frame();
    const auto stacks = column_stack_pairs(frame);
    auto area = [&](std::size_t g, std::size_t i) { return frame.groups()[g].pool[i].area; };
    auto next_larger = [&](std::size_t g, std::size_t idx) {
        std::size_t best = idx;
        for (std::size_t i = 0; i < frame.groups()[g].pool.size(); ++i)
            if (area(g, i) > area(g, idx) && (best == idx || area(g, i) < area(g, best))) best = i;
        return best;
    };
    auto largest_within = [&](std::size_t g, double limit, std::size_t idx) {
        std::size_t best = idx;
        for (std::size_t i = 0; i < frame.groups()[g].pool.size(); ++i)
            if (area(g, i) <= limit && (area(g, best) > limit || area(g, i) > area(g, best))) best = i;
        return best;
    };
    for (std::size_t step = 0; step < max_steps; ++step) {
        const auto an = problem.analyze(a);
        if (!an.unstable && an.report.feasible()) break;
        std::vector<bool> bump(frame.groups().size(), an.unstable || an.report.drift_ratio > 1.0);
        if (!an.unstable)
            for (const auto& m : frame.members())
                if (an.report.stress_ratios[m.id] > 1.0) bump[m.group] = true;
        bool moved = false;
        for (std::size_t g = 0; g < bump.size(); ++g) {
            if (!bump[g]) continue;
            const auto n = next_larger(g, a[g]);
            moved = moved || n != a[g];
            a[g] = n;
        }
        if (!moved)
            for (std::size_t g = 0; g < a.size(); ++g) {
                const auto n = next_larger(g, a[g]);
                moved = moved || n != a[g];
                a[g] = n;
            }
        for (auto [upper, lower] : stacks) {
            if (area(upper, a[upper]) <= area(lower, a[lower])) continue;
            const auto n = next_larger(lower, a[lower]);
            if (n != a[lower]) a[lower] = n;
            else a[upper] = largest_within(upper, area(lower, a[lower]), a[upper]);
            moved = true;
        }
        if (!moved) break;
    }
    return a;
}

/// One seeded GA run.
/// `seeds` replace the first random initial designs.
inline RunHistory run_once(const Problem& problem, const FitnessScheme& scheme, const GAConfig& config,
                           std::uint64_t seed, std::span<const Assignment> seeds = {}) {
    config.validate();
    const auto encoding = Encoding::for_frame(problem.frame());
    Evaluator eval(problem, scheme, encoding, config.jobs);
    Rng rng(seed);

    RunHistory hist;
    hist.seed = seed;
    bool have_any = false;
    auto observe = [&](const std::vector<Individual>& pop) {
        for (const auto& ind : pop) {
            const auto& r = ind.record;
            if (r.feasible()) {
                if (!hist.found_feasible || detail::better_feasible(r, hist.best)) hist.best = r;
                hist.found_feasible = true;
            } else if (!hist.found_feasible && (!have_any || r.fitness > hist.best.fitness)) {
                hist.best = r;
            }
            have_any = true;
        }
    };

    // Initial population of feasible designs: a few random draws, then the
    // least violated draw is upsized until it satisfies every constraint.
    std::vector<Individual> pop;
    pop.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i) {
        Individual ind;
        if (i < seeds.size()) {
            ind.chromosome = encoding.encode(seeds[i]);
            ind.record = eval(ind.chromosome);
            pop.push_back(std::move(ind));
            continue;
        }
        Individual least;
        for (std::size_t attempt = 0; attempt < std::max<std::size_t>(config.init_attempts, 1); ++attempt) {
            Chromosome c;
            c.bits.resize(encoding.length());
            for (auto& b : c.bits) b = static_cast<std::uint8_t>(rng.below(2));
            encoding.repair(c);
            ind.chromosome = std::move(c);
            ind.record = eval(ind.chromosome);
            if (ind.record.feasible()) break;
            if (attempt == 0 || ind.record.worst < least.record.worst) least = ind;
        }
        if (!ind.record.feasible() && config.repair_initial) {
            ind.chromosome = encoding.encode(upsize_repair(least.record.assignment, problem));
            ind.record = eval(ind.chromosome);
        }
        pop.push_back(std::move(ind));
    }
    observe(pop);

    for (std::size_t g = 0; g < config.max_generations; ++g) {
        GenerationRecord rec;
        rec.generation = g + 1;
        auto order = detail::ranking(pop);
        const auto& top = pop[order.front()].record;
        rec.best_weight = top.weight;
        rec.best_lambda = top.lambda;
        rec.best_fitness = top.fitness;
        double sum = 0.0;
        for (const auto& ind : pop) sum += ind.record.fitness;
        rec.mean_fitness = sum / static_cast<double>(pop.size());
        rec.best_so_far_weight = hist.found_feasible ? hist.best.weight : std::numeric_limits<double>::quiet_NaN();
        hist.generations.push_back(rec);

        if (g + 1 == config.max_generations) break;
        pop = eval.batch(step_generation(pop, config, encoding, rng));
        observe(pop);
    }
    hist.evaluations = eval.evaluations();
    return hist;
}

/// Standard GA scoring: crisp constraints, weight scaled linearly over the
/// whole design space.
inline FitnessScheme standard_scheme(const Problem& problem, const FuzzyConfig& cfg) {
    auto [lo, hi] = problem.weight_range();
    if (!(hi > lo)) hi = lo * 1.01 + 1.0;
    FitnessScheme s;
    s.objective = {lo, hi, hi * 1.5, cfg.mu_knee, fuzzy::Shape::Linear};
    s.constraint = {1.0, cfg.delta_g, cfg.n_factor, cfg.mu_knee, fuzzy::Shape::Crisp};
    s.mode = cfg.mode;
    s.penalty = cfg.penalty;
    return s;
}

/// Resolves membership bounds for a run. Crisp -> standard GA scoring.
/// Otherwise F'' defaults to the lightest feasible weight of a short
/// standard-GA pilot run, F' = lower_fraction F'', F_u = upper_factor F''.
inline FitnessScheme resolve_scheme(const Problem& problem, const FuzzyConfig& cfg, const GAConfig& ga,
                                    std::optional<PilotResult>* pilot_out = nullptr) {
    if (cfg.shape == fuzzy::Shape::Crisp) return standard_scheme(problem, cfg);

    double f_upper = 0.0;
    if (cfg.f_upper) {
        f_upper = *cfg.f_upper;
    } else {
        GAConfig pilot = ga;
        pilot.max_generations = std::max<std::size_t>(cfg.pilot_generations, 1);
        pilot.seed = ga.seed ^ 0x9e3779b97f4a7c15ULL;
        auto hist = run_once(problem, standard_scheme(problem, cfg), pilot, pilot.seed);
        // Without a feasible pilot design the heaviest design is the only safe bound.
        f_upper = hist.found_feasible ? hist.best.weight : problem.weight_range().second;
        if (pilot_out) *pilot_out = PilotResult{f_upper, hist.best.assignment, hist.found_feasible};
    }
    FitnessScheme s;
    s.objective.f_upper = f_upper;
    s.objective.f_lower = cfg.f_lower.value_or(cfg.lower_fraction * f_upper);
    s.objective.f_max = cfg.f_max.value_or(cfg.upper_factor * f_upper);
    s.objective.mu_knee = cfg.mu_knee;
    s.objective.shape = cfg.shape;
    s.constraint = {1.0, cfg.delta_g, cfg.n_factor, cfg.mu_knee, cfg.shape};
    s.mode = cfg.mode;
    s.penalty = cfg.penalty;
    s.objective.validate();
    s.constraint.validate();
    s.penalty.validate();
    return s;
}

/// `restarts` independent runs with seeds seed, seed+1, ...; the overall best
/// is the lightest feasible design among them.
inline OptimizationRun run(const Problem& problem, const GAConfig& config, const FuzzyConfig& fuzzy_cfg) {
    config.validate();
    OptimizationRun out;
    out.config = config;
    out.scheme = resolve_scheme(problem, fuzzy_cfg, config, &out.pilot);
    // The fuzzy stage continues from the standard GA: its best design joins
    // every initial population.
    std::vector<Assignment> seeds;
    if (out.pilot && out.pilot->feasible && fuzzy_cfg.seed_from_pilot) seeds.push_back(out.pilot->design);
    for (std::size_t r = 0; r < config.restarts; ++r)
        out.restarts.push_back(run_once(problem, out.scheme, config, config.seed + r, seeds));

    for (std::size_t r = 1; r < out.restarts.size(); ++r) {
        const auto& cand = out.restarts[r];
        const auto& inc = out.restarts[out.best_restart];
        bool better = false;
        if (cand.found_feasible != inc.found_feasible)
            better = cand.found_feasible;
        else if (cand.found_feasible)
            better = cand.best.weight < inc.best.weight;
        else
            better = cand.best.fitness > inc.best.fitness;
        if (better) out.best_restart = r;
    }
    return out;
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{}", v);
}

/// Convergence history as CSV.
inline std::string history_csv(const RunHistory& h) {
    std::string out = "generation,best_weight_n,best_lambda,mean_fitness,best_so_far_weight_n\n";
    for (const auto& g : h.generations)
        out += fmt::format("{},{},{},{},{}\n", g.generation, format_number(g.best_weight), format_number(g.best_lambda),
                           format_number(g.mean_fitness), format_number(g.best_so_far_weight));
    return out;
}

} // namespace semirigid
