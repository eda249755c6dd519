#include "ecosim/evolution.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <fmt/format.h>

#include "ecosim/complexity.hpp"

namespace ecosim {

namespace {

/// floor(rate * n), immune to 0.29 * 100 = 28.999... style rounding.
std::size_t operator_count(double rate, std::size_t n) {
    return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
}

/// First `k` entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

void EvolutionConfig::validate() const {
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw ValidationError(fmt::format("mutation_rate {} outside [0, 1]", mutation_rate));
    }
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
        throw ValidationError(fmt::format("crossover_rate {} outside [0, 1]", crossover_rate));
    }
    if (base_population_size < 1) {
        throw ValidationError("base_population_size must be >= 1");
    }
    if (!(parsimony_coefficient >= 0.0)) {
        throw ValidationError("parsimony_coefficient must be >= 0");
    }
}

int total_distance(const AgentSequence& seq, const UserRequest& req) {
    int total = 0;
    for (int r : req.flattened()) {
        int best = INT_MAX;
        for (const auto& agent : seq.agents()) {
            for (int a : agent.attributes()) {
                best = std::min(best, std::abs(r - a));
            }
        }
        total += best;
    }
    return total;
}

double fitness(const AgentSequence& seq, const UserRequest& req) {
    return 1.0 / (1.0 + static_cast<double>(total_distance(seq, req)));
}

FitnessTable::FitnessTable(const Alphabet& alphabet, const UserRequest& request)
    : alphabet_size_(alphabet.size()), required_(request.flattened().size()) {
    dist_.resize(alphabet_size_ * required_);
    const auto& flat = request.flattened();
    for (std::size_t d = 0; d < alphabet_size_; ++d) {
        const auto& attrs = alphabet[static_cast<AgentIndex>(d)].attributes();
        for (std::size_t r = 0; r < required_; ++r) {
            int best = INT_MAX;
            for (int a : attrs) {
                best = std::min(best, std::abs(flat[r] - a));
            }
            dist_[d * required_ + r] = best;
        }
    }
}

int FitnessTable::total_distance(const Genome& genome) const {
    int total = 0;
    for (std::size_t r = 0; r < required_; ++r) {
        int best = INT_MAX;
        for (AgentIndex a : genome) {
            best = std::min(best, dist_[a * required_ + r]);
        }
        total += best;
    }
    return total;
}

int FitnessTable::best_possible_distance() const {
    int total = 0;
    for (std::size_t r = 0; r < required_; ++r) {
        int best = INT_MAX;
        for (std::size_t d = 0; d < alphabet_size_; ++d) {
            best = std::min(best, dist_[d * required_ + r]);
        }
        total += best;
    }
    return total;
}

double parsimony_fitness(double raw_fitness, std::size_t length, double mean_length,
                         double coefficient) {
    const double excess = static_cast<double>(length) - mean_length;
    if (excess <= 0.0) {
        return raw_fitness;
    }
    return raw_fitness / (1.0 + coefficient * excess);
}

double parsimony_fitness(const AgentSequence& seq, const UserRequest& req, double mean_length,
                         const EvolutionConfig& cfg) {
    if (!(mean_length > 0.0)) {
        throw ValidationError("mean length must be positive");
    }
    return parsimony_fitness(fitness(seq, req), seq.size(), mean_length, cfg.parsimony_coefficient);
}

std::size_t target_population_size(double mean_length, double initial_mean_length,
                                   const EvolutionConfig& cfg) {
    const double base = static_cast<double>(cfg.base_population_size);
    const double scaled = std::ceil(base * mean_length / initial_mean_length - 1e-9);
    return std::max(cfg.base_population_size, static_cast<std::size_t>(std::max(scaled, 0.0)));
}

std::vector<Genome> select(std::span<const Genome> population, std::span<const double> fitnesses,
                           std::size_t target_size, Rng& rng) {
    if (population.empty()) {
        throw ExtinctPopulation();
    }
    if (fitnesses.size() != population.size()) {
        throw ValidationError("one fitness per individual required");
    }
    std::vector<double> cumulative(fitnesses.size());
    std::partial_sum(fitnesses.begin(), fitnesses.end(), cumulative.begin());
    const double total = cumulative.back();
    if (!(total > 0.0)) {
        throw ValidationError("selection needs positive total fitness");
    }
    std::vector<Genome> next;
    next.reserve(target_size);
    for (std::size_t i = 0; i < target_size; ++i) {
        const double u = rng.uniform01() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            --it;
        }
        next.push_back(population[static_cast<std::size_t>(it - cumulative.begin())]);
    }
    return next;
}

std::pair<Genome, Genome> one_point_crossover(const Genome& a, const Genome& b, std::size_t cut) {
    if (cut < 1 || cut > std::min(a.size(), b.size())) {
        throw ValidationError(fmt::format("crossover cut {} outside [1, {}]", cut, std::min(a.size(), b.size())));
    }
    Genome x(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
    x.insert(x.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
    Genome y(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
    y.insert(y.end(), a.begin() + static_cast<std::ptrdiff_t>(cut), a.end());
    return {std::move(x), std::move(y)};
}

Population crossover_population(Population pop, const EvolutionConfig& cfg, Rng& rng) {
    std::size_t n = operator_count(cfg.crossover_rate, pop.size());
    n -= n % 2;
    if (n < 2) {
        return pop;
    }
    const auto chosen = choose_distinct(pop.size(), n, rng);
    for (std::size_t i = 0; i + 1 < chosen.size(); i += 2) {
        auto& a = pop.sequences[chosen[i]];
        auto& b = pop.sequences[chosen[i + 1]];
        const auto cut = static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(std::min(a.size(), b.size()))));
        auto [x, y] = one_point_crossover(a, b, cut);
        a = std::move(x);
        b = std::move(y);
    }
    return pop;
}

void apply_mutation(Genome& g, MutationKind kind, std::size_t site, AgentIndex agent) {
    switch (kind) {
        case MutationKind::Insertion:
            g.insert(g.begin() + static_cast<std::ptrdiff_t>(site), agent);
            break;
        case MutationKind::Replacement:
            g.at(site) = agent;
            break;
        case MutationKind::Deletion:
            if (g.size() < 2) {
                throw ValidationError("deletion would empty the sequence");
            }
            g.erase(g.begin() + static_cast<std::ptrdiff_t>(site));
            break;
    }
}

Population mutate_population(Population pop, const EvolutionConfig& cfg, Rng& rng) {
    const std::size_t n = operator_count(cfg.mutation_rate, pop.size());
    if (n == 0 || pop.alphabet.empty()) {
        return pop;
    }
    const auto chosen = choose_distinct(pop.size(), n, rng);
    for (auto i : chosen) {
        auto& g = pop.sequences[i];
        auto kind = static_cast<MutationKind>(rng.below(3));
        if (kind == MutationKind::Deletion && g.size() == 1) {
            kind = static_cast<MutationKind>(rng.below(2));
        }
        const std::size_t sites = kind == MutationKind::Insertion ? g.size() + 1 : g.size();
        const auto site = static_cast<std::size_t>(rng.below(sites));
        const auto agent = static_cast<AgentIndex>(
            kind == MutationKind::Deletion ? 0 : rng.below(pop.alphabet.size()));
        apply_mutation(g, kind, site, agent);
    }
    return pop;
}

Population initial_population(std::span<const Agent> pool, std::size_t size, Rng& rng) {
    return initial_population(Alphabet::from_agents(pool), size, rng);
}

Population initial_population(Alphabet alphabet, std::size_t size, Rng& rng) {
    Population pop;
    pop.alphabet = std::move(alphabet);
    if (pop.alphabet.empty()) {
        throw ValidationError("seed pool is empty");
    }
    pop.sequences.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Genome g(static_cast<std::size_t>(rng.uniform_int(1, 3)));
        for (auto& a : g) {
            a = static_cast<AgentIndex>(rng.below(pop.alphabet.size()));
        }
        pop.sequences.push_back(std::move(g));
    }
    return pop;
}

Evolution::Evolution(const EvolutionConfig& cfg, std::vector<UserRequest> objectives,
                     Population initial)
    : cfg_(cfg), objectives_(std::move(objectives)), pop_(std::move(initial)), rng_(cfg.seed) {
    cfg_.validate();
    if (objectives_.empty()) {
        throw ValidationError("at least one objective required");
    }
    if (pop_.size() == 0) {
        throw ExtinctPopulation();
    }
    pop_.validate();
    initial_mean_length_ = pop_.mean_length();
    rebuild_tables();
}

void Evolution::rebuild_tables() {
    tables_.clear();
    for (const auto& req : objectives_) {
        tables_.emplace_back(pop_.alphabet, req);
    }
}

std::vector<double> Evolution::raw_fitness() const {
    std::vector<double> f(pop_.size(), 0.0);
    for (const auto& table : tables_) {
        for (std::size_t i = 0; i < pop_.size(); ++i) {
            f[i] = std::max(f[i], table.fitness(pop_.sequences[i]));
        }
    }
    return f;
}

void Evolution::step() {
    const double mean_len = pop_.mean_length();
    const auto target = target_population_size(mean_len, initial_mean_length_, cfg_);

    std::vector<Genome> next;
    next.reserve(target);
    std::vector<double> f(pop_.size());
    const std::size_t k = tables_.size();
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < pop_.size(); ++i) {
            const auto& g = pop_.sequences[i];
            f[i] = parsimony_fitness(tables_[j].fitness(g), g.size(), mean_len, cfg_.parsimony_coefficient);
        }
        const std::size_t share = target / k + (j < target % k ? 1 : 0);
        auto part = select(pop_.sequences, f, share, rng_);
        std::move(part.begin(), part.end(), std::back_inserter(next));
    }
    pop_.sequences = std::move(next);
    pop_ = crossover_population(std::move(pop_), cfg_, rng_);
    pop_ = mutate_population(std::move(pop_), cfg_, rng_);
    ++generation_;
}

GenerationTrace Evolution::trace() const {
    GenerationTrace t;
    t.generation = generation_;
    t.population_size = pop_.size();
    t.mean_length = pop_.mean_length();
    const auto f = raw_fitness();
    t.max_fitness = *std::max_element(f.begin(), f.end());
    t.mean_fitness = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    if (cfg_.track_complexity) {
        try {
            const auto report = analyze(pop_);
            t.complexity = report.complexity;
            t.efficiency = report.efficiency;
        } catch (const PopulationTooSmall&) {
        }
    }
    return t;
}

std::size_t Evolution::best_index() const {
    const auto f = raw_fitness();
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (f[i] > f[best] ||
            (f[i] == f[best] && pop_.sequences[i].size() < pop_.sequences[best].size())) {
            best = i;
        }
    }
    return best;
}

RunResult run(const EvolutionConfig& cfg, std::vector<UserRequest> objectives, Population initial,
              const GenerationObserver& observer) {
    Evolution evo(cfg, std::move(objectives), std::move(initial));
    std::vector<GenerationTrace> traces;
    traces.reserve(cfg.max_generations + 1);
    auto record = [&] {
        traces.push_back(evo.trace());
        if (observer) {
            observer(GenerationView{evo.generation(), evo.population()});
        }
    };
    record();
    for (std::size_t t = 0; t < cfg.max_generations; ++t) {
        evo.step();
        record();
    }
    auto best = evo.population().materialize(evo.best_index());
    return RunResult{std::move(traces), evo.population(), std::move(best)};
}

RunResult run(const EvolutionConfig& cfg, const UserRequest& request,
              std::span<const Agent> seed_pool, const GenerationObserver& observer) {
    Rng init(derive_seed(cfg.seed, 0));
    auto pop = initial_population(seed_pool, cfg.base_population_size, init);
    return run(cfg, std::vector<UserRequest>{request}, std::move(pop), observer);
}

}  // namespace ecosim
