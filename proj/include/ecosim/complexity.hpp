#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecosim/core.hpp"

namespace ecosim {

/// Fewer than |D| samples at site 1: no effective length exists.
class PopulationTooSmall : public Error {
public:
    using Error::Error;
};

/// Entropy requested for a site nobody reaches.
class InsufficientSamples : public Error {
public:
    using Error::Error;
};

/// Character counts at one site over the sequences long enough to have it.
struct SiteDistribution {
    std::size_t site = 0;  // 1-based
    std::vector<std::size_t> counts;  // indexed by AgentIndex
    std::size_t sample_size = 0;

    double probability(AgentIndex d) const;
};

/// Number of sequences with length >= site.
std::size_t sample_size(std::span<const Genome> sequences, std::size_t site);

SiteDistribution site_distribution(std::span<const Genome> sequences, std::size_t alphabet_size,
                                   std::size_t site);
SiteDistribution site_distribution(const Population& pop, std::size_t site);

/// Normalised Shannon entropy -sum p log_|D| p, in [0, 1], with 0 log 0 = 0.
/// A one-character alphabet carries no uncertainty and yields 0.
double per_site_entropy(const SiteDistribution& dist, std::size_t alphabet_size);

/// Calculable length l_V: the greatest l in [1, l_max] with
/// sampleSize(l) >= |D| l / divisor. `divisor` is 1 for a whole population and
/// |T| for a cluster; `slack` loosens the cluster bound multiplicatively.
std::size_t effective_length(std::span<const Genome> sequences, std::size_t alphabet_size,
                             double divisor = 1.0, double slack = 0.0);
std::size_t effective_length(const Population& pop);

struct ComplexityReport {
    std::size_t effective_length = 0;
    std::vector<std::size_t> sample_sizes;  // per site 1..l_V
    std::vector<double> site_entropies;     // per site 1..l_V
    double complexity = 0.0;                // C_V
    double potential = 0.0;                 // C_VP = l_V
    double efficiency = 0.0;                // E = C_V / C_VP

    /// True when sampleSize(l_V + 1) < |D| l_V / divisor also holds.
    bool upper_clause_holds = true;
};

ComplexityReport analyze(std::span<const Genome> sequences, std::size_t alphabet_size,
                         double divisor = 1.0, double slack = 0.0);
ComplexityReport analyze(const Population& pop);

double physical_complexity(const Population& pop);
double complexity_potential(const Population& pop);
double efficiency(const Population& pop);

/// |G| = |D|^l, the number of genotypes of length l.
std::uint64_t genotype_space_size(std::size_t alphabet_size, std::size_t length);

/// Limit efficiency of a population split into |T| pure clusters: 1 - log_|D| |T|.
double expected_cluster_efficiency(std::size_t alphabet_size, std::size_t cluster_count);

/// round(|D|^(1 - E)); the pure-cluster count implied by a limit efficiency.
std::size_t invert_cluster_count(double efficiency_limit, std::size_t alphabet_size);

struct ClusterOptions {
    double efficiency_threshold = 0.9;
    double size_tolerance = 0.25;  // |t| within +-25% of |S|/|T|
    std::size_t max_clusters = 8;
    double sample_slack = 0.0;  // tolerance on the clustered l_V sample bound
    bool require_pure = true;   // dominant per-site characters disjoint across parts
};

struct Cluster {
    std::vector<std::size_t> members;  // indices into the population
    ComplexityReport report;           // l_V computed with the |D| l / |T| bound
};

struct ClusterSet {
    std::vector<Cluster> clusters;
    bool inconclusive = false;

    std::size_t count() const noexcept { return clusters.size(); }
};

/// Smallest partition (k = 1, 2, ...) whose parts all satisfy the cluster
/// conditions. Parts for k > 1 come from a deterministic k-modes clustering
/// under site-wise Hamming distance. If no k passes, returns the whole
/// population as one cluster flagged inconclusive.
ClusterSet detect_clusters(const Population& pop, const ClusterOptions& options = {});

/// E_c: E when |T| = 1, otherwise the mean per-cluster efficiency.
double efficiency_clustered(const Population& pop, const ClusterOptions& options = {});
double efficiency_clustered(const Population& pop, const ClusterSet& clusters);

}  // namespace ecosim
