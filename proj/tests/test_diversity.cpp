#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecosim/diversity.hpp"
#include "oracles.hpp"

using namespace ecosim;

namespace {

std::vector<double> histogram(const RequestDistribution& d, std::size_t draws, RngSeed seed) {
    Rng rng(seed);
    std::vector<double> h(d.bins(), 0.0);
    for (std::size_t i = 0; i < draws; ++i) {
        const int k = sample(d, rng);
        REQUIRE(k >= d.lo);
        REQUIRE(k <= d.hi);
        h[static_cast<std::size_t>(k - d.lo)] += 1;
    }
    return h;
}

std::vector<double> scaled(std::vector<double> p, double n) {
    for (auto& x : p) {
        x *= n;
    }
    return p;
}

}  // namespace

TEST_CASE("law names round-trip") {
    for (Law l : {Law::Uniform, Law::Gaussian, Law::PowerLaw}) {
        CHECK(parse_law(to_string(l)) == l);
    }
    CHECK_THROWS_AS(parse_law("cauchy"), ValidationError);
}

TEST_CASE("support must be positive and ordered") {
    CHECK_THROWS_AS(RequestDistribution::make(Law::Uniform, 0, 5), ValidationError);
    CHECK_THROWS_AS(RequestDistribution::make(Law::Uniform, 6, 5), ValidationError);
    auto d = RequestDistribution::make(Law::Gaussian, 2, 18);
    d.stddev = 0.0;
    CHECK_THROWS_AS(d.validate(), ValidationError);
}

TEST_CASE("uniform lengths pass the uniformity test") {
    const auto d = RequestDistribution::make(Law::Uniform, 2, 18);
    const auto h = histogram(d, 10000, RngSeed{1});
    const auto chi = chi_squared(h, scaled(d.pmf(), 10000));
    CHECK(chi.dof == 16);
    CHECK(chi.statistic < chi_squared_critical(16, 0.95, Tail::Upper));
}

TEST_CASE("gaussian mode sits at the mean") {
    auto d = RequestDistribution::make(Law::Gaussian, 2, 18);
    d.mean = 10;
    d.stddev = 3;
    const auto p = d.pmf();
    CHECK(std::max_element(p.begin(), p.end()) - p.begin() == 8);
    const auto h = histogram(d, 200000, RngSeed{2});
    CHECK(std::max_element(h.begin(), h.end()) - h.begin() == 8);
}

TEST_CASE("power law expected frequencies never increase") {
    const auto d = RequestDistribution::make(Law::PowerLaw, 2, 18);
    const auto p = d.pmf();
    for (std::size_t i = 1; i < p.size(); ++i) {
        CHECK(p[i] <= p[i - 1]);
    }
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("every law's sampler matches its own expected counts") {
    std::uint64_t seed = 10;
    for (Law law : {Law::Uniform, Law::Gaussian, Law::PowerLaw}) {
        for (auto [lo, hi] : {std::pair{2, 18}, std::pair{2, 12}}) {
            const auto d = RequestDistribution::make(law, lo, hi);
            const auto h = histogram(d, 10000, RngSeed{++seed});
            auto [obs, exp] = merge_sparse_bins(h, scaled(d.pmf(), 10000));
            const auto chi = chi_squared(obs, exp);
            CAPTURE(to_string(law));
            CHECK(chi.statistic < chi_squared_critical(chi.dof, 0.95, Tail::Upper));
        }
    }
}

TEST_CASE("generated requests have the asked shape") {
    Rng rng(RngSeed{4});
    const auto one = generate_request(1, 1, rng);
    CHECK(one.length() == 1);
    CHECK(one.flattened().size() == 1);
    const auto big = generate_request(5, 3, rng);
    CHECK(big.length() == 5);
    CHECK(big.modularity() == 3);
    CHECK(big.flattened().size() == 15);
    Rng a(RngSeed{5});
    Rng b(RngSeed{5});
    CHECK(generate_request(4, 2, a) == generate_request(4, 2, b));
}

TEST_CASE("chi-squared statistic") {
    const std::vector<double> same{5, 7, 9};
    CHECK(chi_squared(same, same).statistic == 0.0);
    const std::vector<double> o{10, 10};
    const std::vector<double> e{8, 12};
    const auto chi = chi_squared(o, e);
    CHECK(chi.statistic == doctest::Approx(4.0 / 8 + 4.0 / 12));
    CHECK(chi.dof == 1);
    CHECK_THROWS_AS(chi_squared(std::vector<double>{1, 2}, std::vector<double>{1, 3}), ValidationError);
    CHECK_THROWS_AS(chi_squared(std::vector<double>{3}, std::vector<double>{3}), ValidationError);
}

TEST_CASE("chi-squared is symmetric under joint permutation") {
    Rng rng(RngSeed{6});
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> o(8);
        std::vector<double> e(8, 10.0);
        double total = 0;
        for (auto& x : o) {
            x = static_cast<double>(rng.below(20));
            total += x;
        }
        for (auto& x : e) {
            x = total / 8;
        }
        std::vector<std::size_t> idx(8);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 7; i > 0; --i) {
            std::swap(idx[i], idx[rng.below(i + 1)]);
        }
        std::vector<double> po;
        std::vector<double> pe;
        for (auto i : idx) {
            po.push_back(o[i]);
            pe.push_back(e[i]);
        }
        CHECK(chi_squared(o, e).statistic == doctest::Approx(chi_squared(po, pe).statistic).epsilon(1e-12));
    }
}

TEST_CASE("lower-tail critical values") {
    CHECK(chi_squared_critical(16, 0.95, Tail::Lower) == doctest::Approx(7.962).epsilon(1e-3));
    CHECK(chi_squared_critical(10, 0.95, Tail::Lower) == doctest::Approx(3.940).epsilon(1e-3));
    CHECK_FALSE(50.623 < chi_squared_critical(10, 0.95, Tail::Lower));
}

TEST_CASE("upper-tail critical value at 1 dof") {
    CHECK(chi_squared_critical(1, 0.95, Tail::Upper) == doctest::Approx(3.841).epsilon(1e-3));
}

TEST_CASE("critical values agree with a series-expansion quantile") {
    for (std::size_t dof = 1; dof <= 40; ++dof) {
        for (double q : {0.05, 0.5, 0.95, 0.99}) {
            CHECK(chi_squared_critical(dof, q, Tail::Upper) ==
                  doctest::Approx(oracle::chi2_quantile(dof, q)).epsilon(1e-9));
        }
    }
}

TEST_CASE("lower critical value is below the upper one") {
    for (std::size_t dof = 1; dof <= 200; ++dof) {
        REQUIRE(chi_squared_critical(dof, 0.95, Tail::Lower) < chi_squared_critical(dof, 0.95, Tail::Upper));
    }
    CHECK_THROWS_AS(chi_squared_critical(0, 0.95, Tail::Upper), ValidationError);
    CHECK_THROWS_AS(chi_squared_critical(3, 1.0, Tail::Upper), ValidationError);
}

TEST_CASE("sparse tail bins fold into their neighbours") {
    const std::vector<double> o{0, 3, 40, 50, 6, 1};
    const std::vector<double> e{0.2, 0.5, 45, 45, 8.8, 0.5};
    auto [mo, me] = merge_sparse_bins(o, e);
    CHECK(me.size() == 3);
    CHECK(std::accumulate(mo.begin(), mo.end(), 0.0) == 100.0);
    CHECK(std::accumulate(me.begin(), me.end(), 0.0) == doctest::Approx(100.0));
    for (double x : me) {
        CHECK(x >= 1.0);
    }
}

TEST_CASE("rank correlation") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> up{10, 20, 25, 90, 100};
    const std::vector<double> down{5, 4, 3, 2, 1};
    CHECK(rank_correlation(x, up) == doctest::Approx(1.0));
    CHECK(rank_correlation(x, down) == doctest::Approx(-1.0));
    const std::vector<double> flat{3, 3, 3, 3, 3};
    CHECK(rank_correlation(x, flat) == 0.0);
    const std::vector<double> ties{1, 1, 2, 2, 3};
    CHECK(rank_correlation(x, ties) == doctest::Approx(9.0 / std::sqrt(90.0)));
}

TEST_CASE("diversity experiment is deterministic and self-consistent") {
    DiversityConfig cfg;
    cfg.replicates = 30;
    cfg.evolution.max_generations = 60;
    cfg.master_seed = RngSeed{9};
    const auto len = RequestDistribution::make(Law::Uniform, 2, 6);
    const auto mod = RequestDistribution::make(Law::Uniform, 2, 4);
    const auto a = run_diversity_experiment(len, mod, cfg);
    const auto b = run_diversity_experiment(len, mod, cfg);
    CHECK(a.first.observed == b.first.observed);
    CHECK(a.second.observed == b.second.observed);
    CHECK(a.first.statistic == b.first.statistic);
    for (const auto* r : {&a.first, &a.second}) {
        CHECK(std::accumulate(r->observed.begin(), r->observed.end(), 0.0) == 30.0);
        CHECK(std::accumulate(r->expected.begin(), r->expected.end(), 0.0) == doctest::Approx(30.0));
        if (r->tested) {
            CHECK(r->dof + 1 == r->merged_bins);
            CHECK(r->critical_lower < r->critical_upper);
        }
    }
    CHECK(a.first.property == "length");
    CHECK(a.second.property == "modularity");
}
