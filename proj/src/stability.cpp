#include "ecosim/stability.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "ecosim/parallel.hpp"

namespace ecosim {

namespace {

void enumerate_subsets(const FitnessTable& table, std::size_t start, std::size_t slots,
                       std::vector<int>& mins, int& best) {
    const std::size_t req = table.required_count();
    for (std::size_t a = start; a < table.alphabet_size(); ++a) {
        std::vector<int> saved(mins);
        int total = 0;
        for (std::size_t r = 0; r < req; ++r) {
            mins[r] = std::min(mins[r], table.agent_distance(static_cast<AgentIndex>(a), r));
            total += mins[r];
        }
        best = std::min(best, total);
        if (slots > 1 && best > 0) {
            enumerate_subsets(table, a + 1, slots - 1, mins, best);
        }
        mins = std::move(saved);
    }
}

// Exact-cover style search: every attribute must be served by an agent that
// attains its per-attribute optimum.
bool cover_search(const FitnessTable& table, const std::vector<int>& optimum,
                  std::vector<char>& covered, std::size_t slots, std::size_t& used) {
    const std::size_t req = table.required_count();
    std::size_t first = req;
    for (std::size_t r = 0; r < req; ++r) {
        if (!covered[r]) {
            first = r;
            break;
        }
    }
    if (first == req) {
        return true;
    }
    if (slots == 0) {
        return false;
    }
    for (std::size_t a = 0; a < table.alphabet_size(); ++a) {
        const auto agent = static_cast<AgentIndex>(a);
        if (table.agent_distance(agent, first) != optimum[first]) {
            continue;
        }
        std::vector<char> saved(covered);
        for (std::size_t r = 0; r < req; ++r) {
            if (table.agent_distance(agent, r) == optimum[r]) {
                covered[r] = 1;
            }
        }
        ++used;
        if (cover_search(table, optimum, covered, slots - 1, used)) {
            return true;
        }
        --used;
        covered = std::move(saved);
    }
    return false;
}

}  // namespace

int best_distance_within(const FitnessTable& table, std::size_t max_agents) {
    if (max_agents == 0 || table.alphabet_size() == 0) {
        throw ValidationError("need at least one agent");
    }
    std::vector<int> mins(table.required_count(), INT_MAX);
    int best = INT_MAX;
    enumerate_subsets(table, 0, max_agents, mins, best);
    return best;
}

GlobalOptimum global_max_fitness(const UserRequest& request, const Alphabet& alphabet,
                                 std::size_t length_bound) {
    if (alphabet.empty()) {
        throw ValidationError("alphabet is empty");
    }
    const FitnessTable table(alphabet, request);
    GlobalOptimum out;
    out.distance = table.best_possible_distance();
    out.fitness = 1.0 / (1.0 + out.distance);
    if (out.distance == 0) {
        return out;
    }

    std::vector<int> optimum(table.required_count(), INT_MAX);
    for (std::size_t r = 0; r < optimum.size(); ++r) {
        for (std::size_t a = 0; a < table.alphabet_size(); ++a) {
            optimum[r] = std::min(optimum[r], table.agent_distance(static_cast<AgentIndex>(a), r));
        }
    }
    std::vector<char> covered(optimum.size(), 0);
    std::size_t used = 0;
    if (!cover_search(table, optimum, covered, length_bound, used)) {
        throw OptimumUndecided();
    }
    out.agents = used;
    return out;
}

std::size_t MacroStateLabel::bucket() const noexcept {
    switch (kind) {
        case Kind::Max:
            return kMaxBucket;
        case Kind::Half:
            return kHalfBucket;
        case Kind::Other:
            break;
    }
    return std::min(decile, kOtherBuckets - 1);
}

MacroStateLabel MacroStateLabel::from_bucket(std::size_t bucket) {
    if (bucket == kMaxBucket) {
        return {Kind::Max, 0};
    }
    if (bucket == kHalfBucket) {
        return {Kind::Half, 0};
    }
    if (bucket >= kOtherBuckets) {
        throw ValidationError(fmt::format("no macro-state bucket {}", bucket));
    }
    return {Kind::Other, bucket};
}

MacroStateLabel classify(int best_distance, const GlobalOptimum& optimum, double half_tolerance) {
    if (best_distance <= optimum.distance) {
        return {MacroStateLabel::Kind::Max, 0};
    }
    const double best = 1.0 / (1.0 + best_distance);
    if (std::abs(best - optimum.fitness / 2.0) <= half_tolerance) {
        return {MacroStateLabel::Kind::Half, 0};
    }
    const auto decile = static_cast<std::size_t>(std::floor(10.0 * best / optimum.fitness));
    return {MacroStateLabel::Kind::Other, std::min(decile, kOtherBuckets - 1)};
}

MacroStateLabel classify(const Population& pop, const UserRequest& request,
                         const GlobalOptimum& optimum, double half_tolerance) {
    if (pop.size() == 0) {
        throw ExtinctPopulation();
    }
    const FitnessTable table(pop.alphabet, request);
    int best = INT_MAX;
    for (const auto& g : pop.sequences) {
        best = std::min(best, table.total_distance(g));
    }
    return classify(best, optimum, half_tolerance);
}

double MacroStateDistribution::probability(std::size_t bucket) const {
    if (replicates == 0) {
        return 0.0;
    }
    return static_cast<double>(counts.at(bucket)) / static_cast<double>(replicates);
}

std::array<double, kMacroBuckets> MacroStateDistribution::probabilities() const {
    std::array<double, kMacroBuckets> p{};
    for (std::size_t b = 0; b < kMacroBuckets; ++b) {
        p[b] = probability(b);
    }
    return p;
}

std::vector<MacroStateDistribution> estimate_occupation(const EvolutionConfig& cfg,
                                                        const UserRequest& request,
                                                        std::span<const Agent> pool,
                                                        const OccupationOptions& options) {
    if (options.replicates == 0) {
        throw ValidationError("replicates must be >= 1");
    }
    const auto optimum = global_max_fitness(request, Alphabet::from_agents(pool));
    const std::size_t steps = options.horizon + 1;

    std::vector<std::vector<unsigned char>> labels(options.replicates);
    parallel_for(options.replicates, [&](std::size_t r) {
        EvolutionConfig run_cfg = cfg;
        run_cfg.max_generations = options.horizon;
        run_cfg.track_complexity = false;
        run_cfg.seed = derive_seed(options.master_seed, r);
        auto& out = labels[r];
        out.resize(steps);
        std::optional<FitnessTable> table;
        run(run_cfg, request, pool, [&](const GenerationView& view) {
            if (!table) {
                table.emplace(view.population.alphabet, request);
            }
            int best = INT_MAX;
            for (const auto& g : view.population.sequences) {
                best = std::min(best, table->total_distance(g));
            }
            out[view.generation] = static_cast<unsigned char>(
                classify(best, optimum, options.half_tolerance).bucket());
        });
    }, options.workers);

    std::vector<MacroStateDistribution> curves(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        curves[t].generation = t;
        curves[t].replicates = options.replicates;
        for (const auto& rep : labels) {
            ++curves[t].counts[rep[t]];
        }
    }
    return curves;
}

double degree_of_instability(std::span<const double> distribution, std::size_t buckets) {
    if (buckets < 2) {
        throw EntropyBaseUndefined();
    }
    double total = 0.0;
    double h = 0.0;
    for (double p : distribution) {
        if (p < 0.0 || p > 1.0) {
            throw ValidationError(fmt::format("probability {} outside [0, 1]", p));
        }
        total += p;
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError(fmt::format("distribution sums to {}", total));
    }
    return std::max(0.0, h / std::log(static_cast<double>(buckets)));
}

bool is_stable(std::span<const MacroStateDistribution> curves, const StabilityCriteria& criteria) {
    if (curves.empty()) {
        return false;
    }
    const std::size_t span_len = std::min(curves.size(), criteria.window + 1);
    const auto window = curves.subspan(curves.size() - span_len);
    for (std::size_t b = 0; b < kMacroBuckets; ++b) {
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& d : window) {
            lo = std::min(lo, d.probability(b));
            hi = std::max(hi, d.probability(b));
        }
        if (hi - lo >= criteria.epsilon) {
            return false;
        }
    }
    const auto limit = curves.back().probabilities();
    const auto [mn, mx] = std::minmax_element(limit.begin(), limit.end());
    return *mx - *mn >= criteria.epsilon;
}

InstabilityReport instability_report(std::span<const MacroStateDistribution> curves,
                                     const StabilityCriteria& criteria) {
    if (curves.empty()) {
        throw ValidationError("no occupation curves");
    }
    InstabilityReport rep;
    rep.limit = curves.back().probabilities();
    rep.d_ins = degree_of_instability(rep.limit, kMacroBuckets);
    rep.stable = is_stable(curves, criteria);
    return rep;
}

std::vector<SweepCell> stability_sweep(const EvolutionConfig& base, const UserRequest& request,
                                       std::span<const Agent> pool, const OccupationOptions& options,
                                       std::span<const int> mutation_pcts, std::span<const int> crossover_pcts,
                                       const StabilityCriteria& criteria) {
    std::vector<SweepCell> grid;
    grid.reserve(mutation_pcts.size() * crossover_pcts.size());
    for (int m : mutation_pcts) {
        for (int c : crossover_pcts) {
            EvolutionConfig cfg = base;
            cfg.mutation_rate = m / 100.0;
            cfg.crossover_rate = c / 100.0;
            const auto curves = estimate_occupation(cfg, request, pool, options);
            grid.push_back(SweepCell{m, c, instability_report(curves, criteria)});
        }
    }
    return grid;
}

std::vector<int> percent_grid() {
    std::vector<int> out;
    for (int p = 0; p <= 100; p += 10) {
        out.push_back(p);
    }
    return out;
}

}  // namespace ecosim
