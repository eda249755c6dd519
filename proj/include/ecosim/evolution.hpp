#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ecosim/core.hpp"
#include "ecosim/rng.hpp"

namespace ecosim {

/// Selection was asked to draw from nobody.
class ExtinctPopulation : public Error {
public:
    ExtinctPopulation() : Error("extinct population") {}
};

struct EvolutionConfig {
    double mutation_rate = 0.10;   // fraction of the population receiving one point mutation
    double crossover_rate = 0.10;  // fraction of the population paired for crossover
    std::size_t base_population_size = 50;
    double parsimony_coefficient = 0.10;
    std::size_t max_generations = 1000;
    RngSeed seed{};
    /// Compute C_V and E for every trace row. Off for bulk stability sweeps.
    bool track_complexity = true;

    void validate() const;
};

/// sum over required r of min |r - a|, a ranging over every attribute of every agent in seq.
int total_distance(const AgentSequence& seq, const UserRequest& req);

/// 1 / (1 + total_distance); 1 iff every required attribute is matched exactly.
double fitness(const AgentSequence& seq, const UserRequest& req);

/// Per-agent distance table for one alphabet and one request, so that genome
/// fitness costs |genome| x |R| lookups.
class FitnessTable {
public:
    FitnessTable(const Alphabet& alphabet, const UserRequest& request);

    int total_distance(const Genome& genome) const;
    double fitness(const Genome& genome) const {
        return 1.0 / (1.0 + static_cast<double>(total_distance(genome)));
    }
    /// Distance of the sequence holding every alphabet agent; no sequence does better.
    int best_possible_distance() const;

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t required_count() const noexcept { return required_; }
    int agent_distance(AgentIndex agent, std::size_t r) const { return dist_[agent * required_ + r]; }

private:
    std::size_t alphabet_size_;
    std::size_t required_;
    std::vector<int> dist_;  // [agent][r]
};

/// Raw fitness, divided by 1 + c (len - mean) when the sequence is longer than the mean.
double parsimony_fitness(double raw_fitness, std::size_t length, double mean_length,
                         double coefficient);
double parsimony_fitness(const AgentSequence& seq, const UserRequest& req, double mean_length,
                         const EvolutionConfig& cfg);

/// max(base, ceil(base * mean_len / initial_mean_len)).
std::size_t target_population_size(double mean_length, double initial_mean_length,
                                   const EvolutionConfig& cfg);

/// Fitness-proportional, non-elitist roulette: `target_size` draws with
/// replacement, probability f_i / sum f. Unsampled individuals die.
std::vector<Genome> select(std::span<const Genome> population, std::span<const double> fitnesses,
                           std::size_t target_size, Rng& rng);

/// One-point crossover with a shared cut: prefixes of length `cut` are kept and
/// tails exchanged. Requires 1 <= cut <= min(|a|, |b|).
std::pair<Genome, Genome> one_point_crossover(const Genome& a, const Genome& b, std::size_t cut);

/// floor(rate * |pop|) individuals, paired (odd one skipped), replaced by their offspring.
Population crossover_population(Population pop, const EvolutionConfig& cfg, Rng& rng);

enum class MutationKind { Insertion, Replacement, Deletion };

/// Applies one point mutation of `kind` at `site` (for insertion, the position
/// the new agent will occupy, in [0, |g|]).
void apply_mutation(Genome& g, MutationKind kind, std::size_t site, AgentIndex agent);

/// floor(rate * |pop|) distinct individuals each receive one point mutation of a
/// uniformly chosen kind at a uniform site; a deletion that would empty a
/// sequence is re-rolled as insertion or replacement.
Population mutate_population(Population pop, const EvolutionConfig& cfg, Rng& rng);

/// `size` sequences of uniform length in [1, 3] drawn from `pool`.
Population initial_population(std::span<const Agent> pool, std::size_t size, Rng& rng);
/// Same draws over an existing alphabet.
Population initial_population(Alphabet alphabet, std::size_t size, Rng& rng);

struct GenerationTrace {
    std::size_t generation = 0;
    double max_fitness = 0.0;
    double mean_fitness = 0.0;
    double mean_length = 0.0;
    std::size_t population_size = 0;
    std::optional<double> complexity;  // C_V, absent when the population is too small
    std::optional<double> efficiency;  // E
};

/// A generation as seen by run observers (after mutation, before the next selection).
struct GenerationView {
    std::size_t generation;
    const Population& population;
};

using GenerationObserver = std::function<void(const GenerationView&)>;

/// Evolving population against one or more requests (objectives). With several
/// objectives, each selects an equal share of the next generation by its own
/// fitness; reported fitness is the best over objectives.
class Evolution {
public:
    Evolution(const EvolutionConfig& cfg, std::vector<UserRequest> objectives, Population initial);

    const Population& population() const noexcept { return pop_; }
    std::size_t generation() const noexcept { return generation_; }
    double initial_mean_length() const noexcept { return initial_mean_length_; }

    /// Raw fitness of each individual (best over objectives).
    std::vector<double> raw_fitness() const;

    /// Select, crossover, mutate.
    void step();

    GenerationTrace trace() const;

    /// Index of the fittest individual (raw fitness); ties go to the shortest,
    /// then to the lowest index.
    std::size_t best_index() const;

private:
    void rebuild_tables();

    EvolutionConfig cfg_;
    std::vector<UserRequest> objectives_;
    std::vector<FitnessTable> tables_;
    Population pop_;
    double initial_mean_length_;
    std::size_t generation_ = 0;
    Rng rng_;
};

struct RunResult {
    std::vector<GenerationTrace> traces;  // generations 0..max_generations
    Population final_population;
    AgentSequence best;
};

RunResult run(const EvolutionConfig& cfg, std::vector<UserRequest> objectives, Population initial,
              const GenerationObserver& observer = {});

/// Generation 0 from `seed_pool`, then max_generations steps.
RunResult run(const EvolutionConfig& cfg, const UserRequest& request,
              std::span<const Agent> seed_pool, const GenerationObserver& observer = {});

}  // namespace ecosim
