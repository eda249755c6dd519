#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ecosim/core.hpp"
#include "ecosim/evolution.hpp"

namespace ecosim {

/// No sequence within the search bound attains the distance lower bound.
class OptimumUndecided : public Error {
public:
    OptimumUndecided() : Error("global optimum undecided") {}
};

/// d_ins needs a log base of at least 2.
class EntropyBaseUndefined : public Error {
public:
    EntropyBaseUndefined() : Error("entropy base undefined") {}
};

struct GlobalOptimum {
    int distance = 0;       // minimal total distance over the genotype space
    double fitness = 1.0;   // 1 / (1 + distance)
    std::size_t agents = 0; // size of a witness sequence (0 when the exact cover is trivial)
};

/// Smallest total distance reachable with at most `max_agents` distinct agents.
int best_distance_within(const FitnessTable& table, std::size_t max_agents);

/// Global maximum fitness of `request` over sequences drawn from `alphabet`.
/// Exact cover gives 1 directly. Otherwise the per-attribute lower bound is
/// certified by exhaustive search over agent subsets up to `length_bound`;
/// throws OptimumUndecided if no subset reaches it.
GlobalOptimum global_max_fitness(const UserRequest& request, const Alphabet& alphabet,
                                 std::size_t length_bound = 6);

/// Bucket layout: OTHER deciles 0..9, then M_half, then M_max.
inline constexpr std::size_t kOtherBuckets = 10;
inline constexpr std::size_t kHalfBucket = 10;
inline constexpr std::size_t kMaxBucket = 11;
inline constexpr std::size_t kMacroBuckets = 12;

struct MacroStateLabel {
    enum class Kind { Max, Half, Other };
    Kind kind = Kind::Other;
    std::size_t decile = 0;  // meaningful for Other only

    std::size_t bucket() const noexcept;
    static MacroStateLabel from_bucket(std::size_t bucket);

    friend bool operator==(const MacroStateLabel&, const MacroStateLabel&) = default;
};

/// Classifies from the best individual's total distance. M_max compares
/// integer distances; M_half compares fitness within `half_tolerance`.
MacroStateLabel classify(int best_distance, const GlobalOptimum& optimum, double half_tolerance = 0.01);
MacroStateLabel classify(const Population& pop, const UserRequest& request,
                         const GlobalOptimum& optimum, double half_tolerance = 0.01);

struct MacroStateDistribution {
    std::size_t generation = 0;
    std::size_t replicates = 0;
    std::array<std::size_t, kMacroBuckets> counts{};

    double probability(std::size_t bucket) const;
    double probability(const MacroStateLabel& label) const { return probability(label.bucket()); }
    std::array<double, kMacroBuckets> probabilities() const;
};

struct OccupationOptions {
    std::size_t replicates = 200;
    std::size_t horizon = 300;
    double half_tolerance = 0.01;
    RngSeed master_seed{};
    unsigned workers = 0;
};

/// One distribution per generation 0..horizon, estimated over replicates whose
/// seeds derive from the master seed. `cfg.max_generations` is replaced by the horizon.
std::vector<MacroStateDistribution> estimate_occupation(const EvolutionConfig& cfg,
                                                        const UserRequest& request,
                                                        std::span<const Agent> pool,
                                                        const OccupationOptions& options);

/// -sum p log_N p with 0 log 0 = 0.
double degree_of_instability(std::span<const double> distribution, std::size_t buckets = kMacroBuckets);

struct StabilityCriteria {
    std::size_t window = 50;
    double epsilon = 0.01;
};

/// Converged over the final window (every bucket drifts less than epsilon)
/// and the final distribution is not uniform over the buckets.
bool is_stable(std::span<const MacroStateDistribution> curves, const StabilityCriteria& criteria = {});

struct InstabilityReport {
    std::array<double, kMacroBuckets> limit{};  // distribution at the horizon
    double d_ins = 0.0;
    bool stable = false;
    std::size_t buckets = kMacroBuckets;
};

InstabilityReport instability_report(std::span<const MacroStateDistribution> curves,
                                     const StabilityCriteria& criteria = {});

struct SweepCell {
    int mutation_pct = 0;
    int crossover_pct = 0;
    InstabilityReport report;
};

/// d_ins over the mutation x crossover grid; rates in percent.
std::vector<SweepCell> stability_sweep(const EvolutionConfig& base, const UserRequest& request,
                                       std::span<const Agent> pool, const OccupationOptions& options,
                                       std::span<const int> mutation_pcts, std::span<const int> crossover_pcts,
                                       const StabilityCriteria& criteria = {});

/// 0, 10, ..., 100.
std::vector<int> percent_grid();

}  // namespace ecosim
