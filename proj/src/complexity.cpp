#include "ecosim/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace ecosim {

double SiteDistribution::probability(AgentIndex d) const {
    if (sample_size == 0 || d >= counts.size()) {
        return 0.0;
    }
    return static_cast<double>(counts[d]) / static_cast<double>(sample_size);
}

std::size_t sample_size(std::span<const Genome> sequences, std::size_t site) {
    return static_cast<std::size_t>(std::count_if(
        sequences.begin(), sequences.end(), [site](const Genome& g) { return g.size() >= site; }));
}

SiteDistribution site_distribution(std::span<const Genome> sequences, std::size_t alphabet_size,
                                   std::size_t site) {
    if (site == 0) {
        throw ValidationError("sites are 1-based");
    }
    SiteDistribution dist;
    dist.site = site;
    dist.counts.assign(alphabet_size, 0);
    for (const auto& g : sequences) {
        if (g.size() >= site) {
            ++dist.counts.at(g[site - 1]);
            ++dist.sample_size;
        }
    }
    return dist;
}

SiteDistribution site_distribution(const Population& pop, std::size_t site) {
    return site_distribution(pop.sequences, pop.alphabet.size(), site);
}

double per_site_entropy(const SiteDistribution& dist, std::size_t alphabet_size) {
    if (dist.sample_size == 0) {
        throw InsufficientSamples(fmt::format("insufficient samples at site {}", dist.site));
    }
    if (alphabet_size <= 1) {
        return 0.0;
    }
    const double n = static_cast<double>(dist.sample_size);
    double h = 0.0;
    for (std::size_t c : dist.counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log(p);
        }
    }
    // Clamp rounding noise so a single-character site is exactly 0.
    return std::clamp(h / std::log(static_cast<double>(alphabet_size)), 0.0, 1.0);
}

namespace {

/// Per-site sample counts for sites 1..max_length.
std::vector<std::size_t> sample_profile(std::span<const Genome> sequences) {
    std::size_t max_len = 0;
    for (const auto& g : sequences) {
        max_len = std::max(max_len, g.size());
    }
    std::vector<std::size_t> by_length(max_len + 1, 0);
    for (const auto& g : sequences) {
        ++by_length[g.size()];
    }
    std::vector<std::size_t> profile(max_len + 2, 0);  // profile[i] = sampleSize(i)
    for (std::size_t i = max_len; i >= 1; --i) {
        profile[i] = profile[i + 1] + by_length[i];
    }
    return profile;
}

bool enough(std::size_t samples, std::size_t alphabet_size, std::size_t length, double divisor,
            double slack) {
    if (divisor == 1.0 && slack == 0.0) {
        return samples >= alphabet_size * length;
    }
    const double bound = (1.0 - slack) * static_cast<double>(alphabet_size * length) / divisor;
    return static_cast<double>(samples) + 1e-9 >= bound;
}

}  // namespace

std::size_t effective_length(std::span<const Genome> sequences, std::size_t alphabet_size,
                             double divisor, double slack) {
    if (alphabet_size == 0) {
        throw ValidationError("alphabet must be non-empty");
    }
    const auto profile = sample_profile(sequences);
    const std::size_t max_len = profile.size() - 2;
    std::size_t best = 0;
    // sampleSize is non-increasing and the bound increasing, so the passing
    // lengths form a prefix.
    for (std::size_t l = 1; l <= max_len; ++l) {
        if (!enough(profile[l], alphabet_size, l, divisor, slack)) {
            break;
        }
        best = l;
    }
    if (best == 0) {
        throw PopulationTooSmall(fmt::format(
            "population too small: {} samples at site 1 for alphabet of {}",
            max_len ? profile[1] : 0, alphabet_size));
    }
    return best;
}

std::size_t effective_length(const Population& pop) {
    return effective_length(pop.sequences, pop.alphabet.size());
}

ComplexityReport analyze(std::span<const Genome> sequences, std::size_t alphabet_size,
                         double divisor, double slack) {
    ComplexityReport r;
    r.effective_length = effective_length(sequences, alphabet_size, divisor, slack);
    const auto next = sample_size(sequences, r.effective_length + 1);
    r.upper_clause_holds = next == 0 || !enough(next, alphabet_size, r.effective_length, divisor, slack);

    double sum = 0.0;
    for (std::size_t i = 1; i <= r.effective_length; ++i) {
        const auto dist = site_distribution(sequences, alphabet_size, i);
        const double h = per_site_entropy(dist, alphabet_size);
        r.sample_sizes.push_back(dist.sample_size);
        r.site_entropies.push_back(h);
        sum += h;
    }
    r.potential = static_cast<double>(r.effective_length);
    r.complexity = r.potential - sum;
    r.efficiency = r.complexity / r.potential;
    return r;
}

ComplexityReport analyze(const Population& pop) {
    return analyze(pop.sequences, pop.alphabet.size());
}

double physical_complexity(const Population& pop) { return analyze(pop).complexity; }
double complexity_potential(const Population& pop) { return analyze(pop).potential; }
double efficiency(const Population& pop) { return analyze(pop).efficiency; }

std::uint64_t genotype_space_size(std::size_t alphabet_size, std::size_t length) {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < length; ++i) {
        n *= alphabet_size;
    }
    return n;
}

double expected_cluster_efficiency(std::size_t alphabet_size, std::size_t cluster_count) {
    if (alphabet_size < 2) {
        throw ValidationError("cluster efficiency needs |D| >= 2");
    }
    if (cluster_count < 1 || cluster_count > alphabet_size) {
        throw ValidationError(fmt::format(
            "{} pure clusters cannot share an alphabet of {}", cluster_count, alphabet_size));
    }
    return 1.0 - std::log(static_cast<double>(cluster_count)) /
                     std::log(static_cast<double>(alphabet_size));
}

std::size_t invert_cluster_count(double efficiency_limit, std::size_t alphabet_size) {
    if (efficiency_limit < 0.0 || efficiency_limit > 1.0) {
        throw ValidationError("efficiency limit outside [0, 1]");
    }
    const double t = std::pow(static_cast<double>(alphabet_size), 1.0 - efficiency_limit);
    return static_cast<std::size_t>(std::llround(t));
}

namespace {

using Mode = Genome;

std::size_t hamming(const Genome& a, const Genome& b) {
    const std::size_t common = std::min(a.size(), b.size());
    std::size_t d = std::max(a.size(), b.size()) - common;
    for (std::size_t i = 0; i < common; ++i) {
        d += a[i] != b[i];
    }
    return d;
}

Mode mode_of(const Population& pop, const std::vector<std::size_t>& members) {
    std::map<std::size_t, std::size_t> lengths;
    for (auto m : members) {
        ++lengths[pop.sequences[m].size()];
    }
    const auto len = std::max_element(lengths.begin(), lengths.end(), [](auto& a, auto& b) {
                         return a.second < b.second;
                     })->first;
    Mode mode(len);
    std::vector<std::size_t> counts(pop.alphabet.size());
    for (std::size_t i = 0; i < len; ++i) {
        std::fill(counts.begin(), counts.end(), 0);
        for (auto m : members) {
            const auto& g = pop.sequences[m];
            if (g.size() > i) {
                ++counts[g[i]];
            }
        }
        mode[i] = static_cast<AgentIndex>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    return mode;
}

std::vector<std::vector<std::size_t>> k_modes(const Population& pop, std::size_t k) {
    // Distinct genomes with multiplicity, in lexicographic order.
    std::map<Genome, std::size_t> distinct;
    for (const auto& g : pop.sequences) {
        ++distinct[g];
    }
    std::vector<Mode> modes;
    {
        auto first = std::max_element(distinct.begin(), distinct.end(),
                                      [](auto& a, auto& b) { return a.second < b.second; });
        modes.push_back(first->first);
    }
    while (modes.size() < k) {
        const Genome* pick = nullptr;
        std::size_t pick_dist = 0, pick_count = 0;
        for (const auto& [g, count] : distinct) {
            std::size_t d = SIZE_MAX;
            for (const auto& m : modes) {
                d = std::min(d, hamming(g, m));
            }
            if (d > pick_dist || (d == pick_dist && d > 0 && count > pick_count)) {
                pick = &g;
                pick_dist = d;
                pick_count = count;
            }
        }
        if (!pick) {
            break;  // fewer distinct genomes than k
        }
        modes.push_back(*pick);
    }

    std::vector<std::size_t> assignment(pop.size(), SIZE_MAX);
    std::vector<std::vector<std::size_t>> parts;
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t s = 0; s < pop.size(); ++s) {
            std::size_t best = 0, best_d = SIZE_MAX;
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const auto d = hamming(pop.sequences[s], modes[m]);
                if (d < best_d) {
                    best = m;
                    best_d = d;
                }
            }
            changed |= assignment[s] != best;
            assignment[s] = best;
        }
        parts.assign(modes.size(), {});
        for (std::size_t s = 0; s < pop.size(); ++s) {
            parts[assignment[s]].push_back(s);
        }
        if (!changed) {
            break;
        }
        for (std::size_t m = 0; m < modes.size(); ++m) {
            if (!parts[m].empty()) {
                modes[m] = mode_of(pop, parts[m]);
            }
        }
    }
    return parts;
}

std::vector<Genome> subset(const Population& pop, const std::vector<std::size_t>& members) {
    std::vector<Genome> out;
    out.reserve(members.size());
    for (auto m : members) {
        out.push_back(pop.sequences[m]);
    }
    return out;
}

bool dominant_sites_disjoint(const Population& pop, const std::vector<Cluster>& clusters) {
    std::size_t sites = 0;
    for (const auto& c : clusters) {
        sites = std::max(sites, c.report.effective_length);
    }
    for (std::size_t i = 1; i <= sites; ++i) {
        std::vector<AgentIndex> dominant;
        for (const auto& c : clusters) {
            const auto seqs = subset(pop, c.members);
            const auto dist = site_distribution(seqs, pop.alphabet.size(), i);
            if (dist.sample_size == 0) {
                continue;
            }
            dominant.push_back(static_cast<AgentIndex>(
                std::max_element(dist.counts.begin(), dist.counts.end()) - dist.counts.begin()));
        }
        std::sort(dominant.begin(), dominant.end());
        if (std::adjacent_find(dominant.begin(), dominant.end()) != dominant.end()) {
            return false;
        }
    }
    return true;
}

}  // namespace

ClusterSet detect_clusters(const Population& pop, const ClusterOptions& options) {
    if (pop.size() == 0) {
        throw ValidationError("cannot cluster an empty population");
    }
    const std::size_t d = pop.alphabet.size();
    const std::size_t k_max = std::min(options.max_clusters, pop.size());
    for (std::size_t k = 1; k <= k_max; ++k) {
        std::vector<std::vector<std::size_t>> parts;
        if (k == 1) {
            parts.emplace_back(pop.size());
            std::iota(parts[0].begin(), parts[0].end(), std::size_t{0});
        } else {
            parts = k_modes(pop, k);
            if (parts.size() != k) {
                break;
            }
        }
        const double expected = static_cast<double>(pop.size()) / static_cast<double>(k);
        bool ok = true;
        std::vector<Cluster> clusters;
        for (auto& part : parts) {
            const double sz = static_cast<double>(part.size());
            if (part.empty() || std::abs(sz - expected) > options.size_tolerance * expected) {
                ok = false;
                break;
            }
            Cluster c;
            c.members = std::move(part);
            try {
                c.report = analyze(subset(pop, c.members), d, static_cast<double>(k), options.sample_slack);
            } catch (const PopulationTooSmall&) {
                ok = false;
                break;
            }
            if (c.report.efficiency < options.efficiency_threshold) {
                ok = false;
                break;
            }
            clusters.push_back(std::move(c));
        }
        if (ok && k > 1 && options.require_pure && !dominant_sites_disjoint(pop, clusters)) {
            ok = false;
        }
        if (ok) {
            return ClusterSet{std::move(clusters), false};
        }
    }
    ClusterSet trivial;
    trivial.inconclusive = true;
    Cluster all;
    all.members.resize(pop.size());
    std::iota(all.members.begin(), all.members.end(), std::size_t{0});
    all.report = analyze(pop);
    trivial.clusters.push_back(std::move(all));
    return trivial;
}

double efficiency_clustered(const Population& pop, const ClusterSet& clusters) {
    if (clusters.count() <= 1) {
        return efficiency(pop);
    }
    double sum = 0.0;
    for (const auto& c : clusters.clusters) {
        sum += c.report.efficiency;
    }
    return sum / static_cast<double>(clusters.count());
}

double efficiency_clustered(const Population& pop, const ClusterOptions& options) {
    return efficiency_clustered(pop, detect_clusters(pop, options));
}

}  // namespace ecosim
