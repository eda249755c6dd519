#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecosim/core.hpp"
#include "ecosim/evolution.hpp"
#include "ecosim/rng.hpp"

namespace ecosim {

enum class Law { Uniform, Gaussian, PowerLaw };

std::string to_string(Law law);
Law parse_law(const std::string& name);

/// Integer-valued request property law on [lo, hi].
struct RequestDistribution {
    Law law = Law::Uniform;
    int lo = 1;
    int hi = 1;
    double mean = 1.0;    // Gaussian
    double stddev = 1.0;  // Gaussian
    double alpha = 2.0;   // PowerLaw

    /// Defaults: Gaussian mean at the midpoint with stddev span/6, PowerLaw alpha 2.
    static RequestDistribution make(Law law, int lo, int hi);

    void validate() const;
    std::size_t bins() const noexcept { return static_cast<std::size_t>(hi - lo + 1); }

    /// Probability of each support value lo..hi under the sampler below.
    std::vector<double> pmf() const;
    double expected_value() const;
};

/// Uniform draws exactly; Gaussian rounds and redraws outside the support;
/// PowerLaw inverts the discrete CDF of k^-alpha.
int sample(const RequestDistribution& dist, Rng& rng);
inline int sample_length(const RequestDistribution& dist, Rng& rng) { return sample(dist, rng); }
inline int sample_modularity(const RequestDistribution& dist, Rng& rng) { return sample(dist, rng); }

/// `length` groups of `modularity` uniform attributes.
UserRequest generate_request(std::size_t length, std::size_t modularity, Rng& rng);

struct ChiSquared {
    double statistic = 0.0;
    std::size_t dof = 0;
};

ChiSquared chi_squared(std::span<const double> observed, std::span<const double> expected);

/// Folds tail bins into their neighbour until every expected count reaches
/// `min_expected`. Returns the merged (observed, expected) pair.
std::pair<std::vector<double>, std::vector<double>> merge_sparse_bins(std::vector<double> observed,
                                                                      std::vector<double> expected,
                                                                      double min_expected = 1.0);

enum class Tail { Lower, Upper };

/// Lower: the value below which `percentile` of the mass lies is taken at
/// 1 - percentile (so (16, 0.95, Lower) = 7.962). Upper: the usual rejection point.
double chi_squared_critical(std::size_t dof, double percentile, Tail tail);

/// Spearman rank correlation with average ranks for ties; 0 if either side is constant.
double rank_correlation(std::span<const double> x, std::span<const double> y);

struct DiversityResult {
    std::string property;  // "length" or "modularity"
    RequestDistribution law;
    std::vector<int> values;        // support values, one per original bin
    std::vector<double> observed;   // counts per support value
    std::vector<double> expected;   // law scaled to the replicate count
    double statistic = 0.0;
    std::size_t dof = 0;
    std::size_t merged_bins = 0;    // bins after tail merging
    double critical_lower = 0.0;
    double critical_upper = 0.0;
    bool pass_lower = false;  // statistic < lower-tail 0.95 point
    bool pass_upper = false;  // statistic < upper-tail 0.95 point
    bool tested = false;      // false for a one-value support
    double observed_mean = 0.0;
    double expected_mean = 0.0;
    double rank_correlation = 0.0;
};

struct DiversityConfig {
    std::size_t replicates = 500;
    std::size_t pool_size = 20;
    EvolutionConfig evolution{};  // max_generations is the per-replicate run length
    RngSeed master_seed{};
    double percentile = 0.95;
    unsigned workers = 0;
};

/// Per replicate: draw length and modularity, build a request, seed a pool of
/// one provider per group plus random agents, evolve, and record the best
/// sequence's size and its agents' mean attribute count (rounded). Values
/// outside a support are counted in the nearest end bin.
std::pair<DiversityResult, DiversityResult> run_diversity_experiment(const RequestDistribution& length,
                                                                     const RequestDistribution& modularity,
                                                                     const DiversityConfig& cfg);

}  // namespace ecosim
