#include "ecosim/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "ecosim/parallel.hpp"
#include "ecosim/scenario.hpp"

namespace ecosim {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            out[order[k]] = avg;
        }
        i = j + 1;
    }
    return out;
}

DiversityResult summarise(const std::string& property, const RequestDistribution& law,
                          const std::vector<int>& samples, double percentile) {
    DiversityResult res;
    res.property = property;
    res.law = law;
    const std::size_t bins = law.bins();
    res.values.resize(bins);
    std::iota(res.values.begin(), res.values.end(), law.lo);
    res.observed.assign(bins, 0.0);
    double sum = 0.0;
    for (int v : samples) {
        const int clamped = std::clamp(v, law.lo, law.hi);
        res.observed[static_cast<std::size_t>(clamped - law.lo)] += 1.0;
        sum += v;
    }
    const double n = static_cast<double>(samples.size());
    res.observed_mean = sum / n;
    res.expected_mean = law.expected_value();
    res.expected = law.pmf();
    for (auto& e : res.expected) {
        e *= n;
    }
    if (bins < 2) {
        return res;
    }
    res.rank_correlation = rank_correlation(res.observed, res.expected);
    auto [obs, exp] = merge_sparse_bins(res.observed, res.expected);
    res.merged_bins = obs.size();
    if (obs.size() < 2) {
        return res;
    }
    const auto chi = chi_squared(obs, exp);
    res.tested = true;
    res.statistic = chi.statistic;
    res.dof = chi.dof;
    res.critical_lower = chi_squared_critical(chi.dof, percentile, Tail::Lower);
    res.critical_upper = chi_squared_critical(chi.dof, percentile, Tail::Upper);
    res.pass_lower = res.statistic < res.critical_lower;
    res.pass_upper = res.statistic < res.critical_upper;
    return res;
}

}  // namespace

std::string to_string(Law law) {
    switch (law) {
        case Law::Uniform:
            return "uniform";
        case Law::Gaussian:
            return "gaussian";
        case Law::PowerLaw:
            return "powerlaw";
    }
    return "?";
}

Law parse_law(const std::string& name) {
    if (name == "uniform") {
        return Law::Uniform;
    }
    if (name == "gaussian") {
        return Law::Gaussian;
    }
    if (name == "powerlaw") {
        return Law::PowerLaw;
    }
    throw ValidationError(fmt::format("unknown law '{}'", name));
}

RequestDistribution RequestDistribution::make(Law law, int lo, int hi) {
    RequestDistribution d;
    d.law = law;
    d.lo = lo;
    d.hi = hi;
    d.mean = (lo + hi) / 2.0;
    d.stddev = std::max(1e-9, (hi - lo) / 6.0);
    d.alpha = 2.0;
    d.validate();
    return d;
}

void RequestDistribution::validate() const {
    if (lo < 1 || hi < lo) {
        throw ValidationError(fmt::format("support [{}, {}] invalid", lo, hi));
    }
    if (law == Law::Gaussian && !(stddev > 0.0)) {
        throw ValidationError("gaussian stddev must be positive");
    }
    if (law == Law::PowerLaw && !(alpha > 0.0)) {
        throw ValidationError("power-law exponent must be positive");
    }
}

std::vector<double> RequestDistribution::pmf() const {
    std::vector<double> p(bins());
    for (int k = lo; k <= hi; ++k) {
        double w = 1.0;
        if (law == Law::Gaussian) {
            w = normal_cdf((k + 0.5 - mean) / stddev) - normal_cdf((k - 0.5 - mean) / stddev);
        } else if (law == Law::PowerLaw) {
            w = std::pow(static_cast<double>(k), -alpha);
        }
        p[static_cast<std::size_t>(k - lo)] = w;
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) {
        x /= total;
    }
    return p;
}

double RequestDistribution::expected_value() const {
    const auto p = pmf();
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        e += p[i] * (lo + static_cast<double>(i));
    }
    return e;
}

int sample(const RequestDistribution& dist, Rng& rng) {
    switch (dist.law) {
        case Law::Uniform:
            return rng.uniform_int(dist.lo, dist.hi);
        case Law::Gaussian:
            for (;;) {
                const auto k = std::llround(dist.mean + dist.stddev * rng.normal());
                if (k >= dist.lo && k <= dist.hi) {
                    return static_cast<int>(k);
                }
            }
        case Law::PowerLaw: {
            const auto p = dist.pmf();
            const double u = rng.uniform01();
            double cum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                cum += p[i];
                if (u < cum) {
                    return dist.lo + static_cast<int>(i);
                }
            }
            return dist.hi;
        }
    }
    return dist.lo;
}

UserRequest generate_request(std::size_t length, std::size_t modularity, Rng& rng) {
    if (length < 1 || modularity < 1) {
        throw ValidationError("request length and modularity must be >= 1");
    }
    std::vector<std::vector<int>> groups(length, std::vector<int>(modularity));
    for (auto& g : groups) {
        for (auto& a : g) {
            a = rng.uniform_int(kMinAttribute, kMaxAttribute);
        }
    }
    return UserRequest(std::move(groups));
}

ChiSquared chi_squared(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size()) {
        throw ValidationError("observed and expected differ in bin count");
    }
    if (observed.size() < 2) {
        throw ValidationError("chi-squared needs at least two bins");
    }
    double total_o = 0.0;
    double total_e = 0.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) {
            throw ValidationError(fmt::format("expected count in bin {} is zero", i));
        }
        total_o += observed[i];
        total_e += expected[i];
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    if (std::abs(total_o - total_e) > 1e-6 * std::max(1.0, total_e)) {
        throw ValidationError(fmt::format("totals differ: observed {} vs expected {}", total_o, total_e));
    }
    return ChiSquared{stat, observed.size() - 1};
}

std::pair<std::vector<double>, std::vector<double>> merge_sparse_bins(std::vector<double> observed,
                                                                      std::vector<double> expected,
                                                                      double min_expected) {
    if (observed.size() != expected.size()) {
        throw ValidationError("observed and expected differ in bin count");
    }
    while (expected.size() > 1 && expected.back() < min_expected) {
        expected[expected.size() - 2] += expected.back();
        observed[observed.size() - 2] += observed.back();
        expected.pop_back();
        observed.pop_back();
    }
    while (expected.size() > 1 && expected.front() < min_expected) {
        expected[1] += expected.front();
        observed[1] += observed.front();
        expected.erase(expected.begin());
        observed.erase(observed.begin());
    }
    return {std::move(observed), std::move(expected)};
}

double chi_squared_critical(std::size_t dof, double percentile, Tail tail) {
    if (dof < 1) {
        throw ValidationError("chi-squared critical value needs dof >= 1");
    }
    if (!(percentile > 0.0 && percentile < 1.0)) {
        throw ValidationError(fmt::format("percentile {} outside (0, 1)", percentile));
    }
    const double q = tail == Tail::Lower ? 1.0 - percentile : percentile;
    return 2.0 * boost::math::gamma_p_inv(static_cast<double>(dof) / 2.0, q);
}

double rank_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("rank correlation needs two equal-length series of size >= 2");
    }
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::pair<DiversityResult, DiversityResult> run_diversity_experiment(const RequestDistribution& length,
                                                                     const RequestDistribution& modularity,
                                                                     const DiversityConfig& cfg) {
    length.validate();
    modularity.validate();
    if (cfg.replicates == 0) {
        throw ValidationError("replicates must be >= 1");
    }
    std::vector<int> sizes(cfg.replicates);
    std::vector<int> widths(cfg.replicates);
    parallel_for(cfg.replicates, [&](std::size_t r) {
        const RngSeed rep_seed = derive_seed(cfg.master_seed, r);
        Rng rng(rep_seed);
        const auto len = static_cast<std::size_t>(sample_length(length, rng));
        const auto mod = static_cast<std::size_t>(sample_modularity(modularity, rng));
        const auto request = generate_request(len, mod, rng);
        const auto pool = provider_pool(request, cfg.pool_size, rng);
        EvolutionConfig evo = cfg.evolution;
        evo.track_complexity = false;
        evo.seed = derive_seed(rep_seed, 1);
        const auto result = run(evo, request, pool);
        std::size_t attrs = 0;
        for (const auto& a : result.best.agents()) {
            attrs += a.size();
        }
        sizes[r] = static_cast<int>(result.best.size());
        widths[r] = static_cast<int>(
            std::llround(static_cast<double>(attrs) / static_cast<double>(result.best.size())));
    }, cfg.workers);
    return {summarise("length", length, sizes, cfg.percentile),
            summarise("modularity", modularity, widths, cfg.percentile)};
}

}  // namespace ecosim
