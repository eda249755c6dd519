#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ecosim/diversity.hpp"
#include "ecosim/habitat.hpp"
#include "ecosim/scenario.hpp"

using namespace ecosim;

namespace {

NetworkParams frozen_params() {
    NetworkParams p;
    p.hebbian.reinforce = 0.0;
    p.hebbian.decay = 0.0;
    return p;
}

EvolutionConfig small_config(std::size_t generations) {
    EvolutionConfig cfg;
    cfg.max_generations = generations;
    cfg.base_population_size = 20;
    cfg.track_complexity = false;
    return cfg;
}

std::vector<Agent> providers_for(const UserRequest& req, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    return provider_pool(req, 20, rng);
}

}  // namespace

TEST_CASE("fresh habitat seeds over its whole pool") {
    UserRequest req({{10}, {20}});
    Habitat h;
    h.pool = providers_for(req, 1);
    Rng rng(RngSeed{1});
    const auto pop = seed_population(h, req, 50, rng);
    CHECK(pop.alphabet.size() == 20);
    CHECK(pop.size() == 50);
}

TEST_CASE("barren habitat cannot seed") {
    Habitat h;
    Rng rng(RngSeed{1});
    CHECK_THROWS_AS(seed_population(h, UserRequest(std::vector<std::vector<int>>{{1}}), 10, rng), BarrenHabitat);
}

TEST_CASE("a hosted optimum is reused in generation 0") {
    UserRequest req({{10}, {20}});
    Habitat h;
    h.pool = providers_for(req, 2);
    const AgentSequence optimum({Agent({10}), Agent({20})});
    h.host(optimum);
    CHECK_FALSE(h.host(optimum));
    Rng rng(RngSeed{2});
    const auto pop = seed_population(h, req, 30, rng);
    bool found = false;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        found = found || pop.materialize(i) == optimum;
    }
    CHECK(found);
}

TEST_CASE("seeding is reproducible") {
    UserRequest req({{10}, {20}});
    Habitat a;
    a.pool = providers_for(req, 3);
    Habitat b = a;
    b.id = 7;
    Rng ra(RngSeed{3});
    Rng rb(RngSeed{3});
    CHECK(seed_population(a, req, 40, ra).sequences == seed_population(b, req, 40, rb).sequences);
}

TEST_CASE("no migration over zero-probability links") {
    UserRequest req(std::vector<std::vector<int>>{{10}});
    HabitatNetwork net(NetworkParams{});
    const auto a = net.add_habitat(providers_for(req, 4));
    const auto b = net.add_habitat(providers_for(req, 5));
    net.connect(a, b, 0.0, 0.0);
    net.habitat(b).receive(req, 5);
    Rng rng(RngSeed{4});
    for (int i = 0; i < 100; ++i) {
        CHECK(deploy_and_migrate(net, a, AgentSequence({Agent({10})}), rng).empty());
    }
    CHECK(net.habitat(b).hosted.empty());
    CHECK(net.habitat(a).hosted.size() == 1);
}

TEST_CASE("certain link to a neighbour with the same request succeeds") {
    UserRequest req(std::vector<std::vector<int>>{{10}});
    HabitatNetwork net(NetworkParams{});
    const auto a = net.add_habitat(providers_for(req, 6));
    const auto b = net.add_habitat(providers_for(req, 7));
    net.connect(a, b, 1.0, 0.2);
    net.habitat(b).receive(req, 5);
    Rng rng(RngSeed{6});
    const auto events = deploy_and_migrate(net, a, AgentSequence({Agent({10})}), rng, 3);
    REQUIRE(events.size() == 1);
    CHECK(events[0].success);
    CHECK(events[0].from == a);
    CHECK(events[0].to == b);
    CHECK(events[0].step == 3);
    CHECK(net.habitat(b).hosted.size() == 1);
    CHECK(net.probability(b, a) == 0.2);
}

TEST_CASE("migration attempts follow the link probability") {
    UserRequest req(std::vector<std::vector<int>>{{10}});
    HabitatNetwork net(frozen_params());
    const auto a = net.add_habitat(providers_for(req, 8));
    const auto b = net.add_habitat(providers_for(req, 9));
    net.connect(a, b, 0.3, 0.3);
    Rng rng(RngSeed{8});
    std::size_t attempts = 0;
    for (int i = 0; i < 1000; ++i) {
        attempts += deploy_and_migrate(net, a, AgentSequence({Agent({10})}), rng).size();
    }
    const double sigma = std::sqrt(1000 * 0.3 * 0.7);
    CHECK(std::abs(static_cast<double>(attempts) - 300.0) <= 3 * sigma);
}

TEST_CASE("hebbian updates converge to the bounds") {
    HebbianParams p;
    double up = 0.5;
    double down = 0.5;
    for (int i = 0; i < 500; ++i) {
        up = hebbian_next(up, true, p);
        down = hebbian_next(down, false, p);
    }
    CHECK(up == doctest::Approx(p.ceiling));
    CHECK(down == doctest::Approx(p.floor));
}

TEST_CASE("alternating outcomes follow the recurrence") {
    HebbianParams params;
    Connection c{0, 1, 0.5, 0.5};
    double expect = 0.5;
    for (int i = 0; i < 20; ++i) {
        const bool ok = i % 2 == 0;
        expect = ok ? std::min(0.99, expect + 0.1 * (1 - expect)) : std::max(0.01, expect - 0.1 * expect);
        hebbian_update(c, 0, ok, params);
        CHECK(c.p_ab == doctest::Approx(expect).epsilon(1e-15));
        CHECK(c.p_ba == 0.5);
    }
    CHECK_THROWS_AS(hebbian_update(c, 5, true, params), ValidationError);
}

TEST_CASE("connection probabilities stay within bounds") {
    HebbianParams params;
    params.reinforce = 0.7;
    params.decay = 0.9;
    params.floor = 0.05;
    params.ceiling = 0.9;
    Rng rng(RngSeed{10});
    Connection c{0, 1, 0.5, 0.5};
    for (int i = 0; i < 2000; ++i) {
        hebbian_update(c, rng.below(2), rng.bernoulli(0.5), params);
        REQUIRE(c.p_ab >= params.floor);
        REQUIRE(c.p_ab <= params.ceiling);
        REQUIRE(c.p_ba >= params.floor);
        REQUIRE(c.p_ba <= params.ceiling);
    }
}

TEST_CASE("invalid network parameters are rejected") {
    NetworkParams p;
    p.hebbian.floor = 0.9;
    p.hebbian.ceiling = 0.5;
    CHECK_THROWS_AS(HabitatNetwork{p}, ValidationError);
    HabitatNetwork net(NetworkParams{});
    net.add_habitat({Agent({1})});
    CHECK_THROWS_AS(net.connect(0, 0, 0.5, 0.5), ValidationError);
    CHECK_THROWS_AS(net.connect(0, 3, 0.5, 0.5), ValidationError);
}

TEST_CASE("an unconnected habitat behaves as a standalone run") {
    UserRequest req({{12, 40}, {77}});
    const auto pool = providers_for(req, 11);
    HabitatNetwork net(NetworkParams{});
    net.add_habitat(pool);
    const auto cfg = small_config(80);
    const std::vector<TargetedRequest> batch{{0, req}};
    const auto step = step_network(net, batch, cfg, RngSeed{21});

    EvolutionConfig solo = cfg;
    solo.seed = derive_seed(RngSeed{21}, 0);
    Rng init(derive_seed(solo.seed, 0));
    auto pop = initial_population(Alphabet::from_agents(pool), cfg.base_population_size, init);
    const auto ref = run(solo, std::vector<UserRequest>{req}, std::move(pop));

    REQUIRE(step.runs.size() == 1);
    REQUIRE(step.runs[0].traces.size() == ref.traces.size());
    for (std::size_t t = 0; t < ref.traces.size(); ++t) {
        REQUIRE(step.runs[0].traces[t].max_fitness == ref.traces[t].max_fitness);
        REQUIRE(step.runs[0].traces[t].mean_fitness == ref.traces[t].mean_fitness);
    }
    CHECK(step.runs[0].best == ref.best);
    CHECK(step.migrations.empty());
}

TEST_CASE("communities strengthen their internal links") {
    // habitats 0,1 serve one request family and 2,3 another
    Rng rng(RngSeed{12});
    const auto ra = generate_request(2, 1, rng);
    const auto rb = generate_request(2, 1, rng);
    HabitatNetwork net(NetworkParams{});
    for (int h = 0; h < 4; ++h) {
        auto pool = provider_pool(ra, 10, rng);
        auto other = provider_pool(rb, 10, rng);
        pool.insert(pool.end(), other.begin(), other.end());
        net.add_habitat(pool);
    }
    for (HabitatId a = 0; a < 4; ++a) {
        for (HabitatId b = a + 1; b < 4; ++b) {
            net.connect(a, b, 0.5, 0.5);
        }
    }
    const auto cfg = small_config(15);
    for (std::size_t step = 0; step < 500; ++step) {
        const HabitatId h = rng.below(4);
        const std::vector<TargetedRequest> batch{{h, h < 2 ? ra : rb}};
        step_network(net, batch, cfg, derive_seed(RngSeed{12}, step), step);
    }
    double within = 0.0;
    double across = 0.0;
    for (const auto& c : net.connections()) {
        const bool same = (c.a < 2) == (c.b < 2);
        (same ? within : across) += (c.p_ab + c.p_ba) / 2.0;
    }
    within /= 2.0;
    across /= 4.0;
    CHECK(within > across);
}

TEST_CASE("migration never fabricates agents") {
    Rng rng(RngSeed{13});
    auto net = small_world_network(6, 2, 0.2, 20, rng);
    const auto cfg = small_config(20);
    for (std::size_t step = 0; step < 30; ++step) {
        const HabitatId h = rng.below(net.size());
        const std::vector<TargetedRequest> batch{{h, generate_request(2, 2, rng)}};
        step_network(net, batch, cfg, derive_seed(RngSeed{13}, step), step);
    }
    std::set<Agent> known;
    for (HabitatId h = 0; h < net.size(); ++h) {
        known.insert(net.habitat(h).pool.begin(), net.habitat(h).pool.end());
    }
    std::size_t hosted = 0;
    for (HabitatId h = 0; h < net.size(); ++h) {
        for (const auto& seq : net.habitat(h).hosted) {
            ++hosted;
            for (const auto& a : seq.agents()) {
                REQUIRE(known.count(a) == 1);
            }
        }
    }
    CHECK(hosted >= 30);
}

TEST_CASE("small world network shape") {
    Rng rng(RngSeed{14});
    auto net = small_world_network(10, 4, 0.1, 20, rng);
    CHECK(net.size() == 10);
    CHECK(net.connections().size() <= 20);
    CHECK(net.connections().size() >= 15);
    for (const auto& c : net.connections()) {
        CHECK(c.a < c.b);
        CHECK(c.p_ab == 0.5);
        CHECK(c.p_ba == 0.5);
    }
    for (HabitatId h = 0; h < 10; ++h) {
        CHECK(net.habitat(h).pool.size() == 20);
    }
    std::ostringstream out;
    net.write_topology(out);
    CHECK(out.str().rfind("a,b,p_ab,p_ba\n", 0) == 0);
    CHECK_THROWS_AS(small_world_network(3, 3, 0.1, 5, rng), ValidationError);
}

TEST_CASE("generations to target") {
    std::vector<GenerationTrace> traces(5);
    for (std::size_t i = 0; i < 5; ++i) {
        traces[i].generation = i;
        traces[i].max_fitness = 0.2 * static_cast<double>(i);
    }
    CHECK(generations_to_target(traces, 0.5) == std::size_t{3});
    CHECK(generations_to_target(traces, 0.0) == std::size_t{0});
    CHECK_FALSE(generations_to_target(traces, 0.95).has_value());
}

TEST_CASE("sharing trials are reproducible") {
    SharingConfig cfg;
    cfg.evolution = small_config(100);
    const auto a = sharing_trial(cfg, RngSeed{15});
    const auto b = sharing_trial(cfg, RngSeed{15});
    CHECK(a.shared == b.shared);
    CHECK(a.isolated == b.isolated);
    CHECK(a.migrated == b.migrated);
    CHECK(a.migrations.size() == b.migrations.size());
    REQUIRE(a.topology.size() == 1);
}
