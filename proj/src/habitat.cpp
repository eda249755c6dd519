#include "ecosim/habitat.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/small_world_generator.hpp>
#include <boost/random/linear_congruential.hpp>
#include <fmt/format.h>

#include "ecosim/scenario.hpp"
#include "ecosim/diversity.hpp"

namespace ecosim {

void HebbianParams::validate() const {
    if (!(floor >= 0.0 && floor <= ceiling && ceiling <= 1.0)) {
        throw ValidationError(fmt::format("hebbian bounds [{}, {}] invalid", floor, ceiling));
    }
    if (!(reinforce >= 0.0 && reinforce <= 1.0 && decay >= 0.0 && decay <= 1.0)) {
        throw ValidationError("hebbian rates must lie in [0, 1]");
    }
}

void NetworkParams::validate() const {
    hebbian.validate();
    if (!(usefulness_threshold >= 0.0 && usefulness_threshold <= 1.0)) {
        throw ValidationError("usefulness_threshold outside [0, 1]");
    }
    if (!(reuse_threshold >= 0.0 && reuse_threshold <= 1.0)) {
        throw ValidationError("reuse_threshold outside [0, 1]");
    }
    if (request_window < 1) {
        throw ValidationError("request_window must be >= 1");
    }
    if (!(new_agent_rate >= 0.0 && new_agent_rate <= 1.0)) {
        throw ValidationError("new_agent_rate outside [0, 1]");
    }
}

void Habitat::receive(const UserRequest& request, std::size_t window) {
    recent.push_back(request);
    while (recent.size() > window) {
        recent.pop_front();
    }
}

bool Habitat::host(const AgentSequence& seq) {
    if (std::find(hosted.begin(), hosted.end(), seq) != hosted.end()) {
        return false;
    }
    hosted.push_back(seq);
    return true;
}

HabitatNetwork::HabitatNetwork(NetworkParams params) : params_(params) { params_.validate(); }

HabitatId HabitatNetwork::add_habitat(std::vector<Agent> pool) {
    Habitat h;
    h.id = habitats_.size();
    h.pool = std::move(pool);
    habitats_.push_back(std::move(h));
    return habitats_.back().id;
}

std::size_t HabitatNetwork::connect(HabitatId a, HabitatId b, double p_ab, double p_ba) {
    if (a >= size() || b >= size() || a == b) {
        throw ValidationError(fmt::format("cannot connect habitats {} and {}", a, b));
    }
    for (double p : {p_ab, p_ba}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError(fmt::format("connection probability {} outside [0, 1]", p));
        }
    }
    connections_.push_back(Connection{a, b, p_ab, p_ba});
    return connections_.size() - 1;
}

double HabitatNetwork::probability(HabitatId from, HabitatId to) const {
    for (const auto& c : connections_) {
        if ((c.a == from && c.b == to) || (c.b == from && c.a == to)) {
            return c.probability(from);
        }
    }
    return 0.0;
}

void HabitatNetwork::write_topology(std::ostream& out) const {
    out << "a,b,p_ab,p_ba\n";
    for (const auto& c : connections_) {
        out << fmt::format("{},{},{},{}\n", c.a, c.b, c.p_ab, c.p_ba);
    }
}

Population seed_population(const Habitat& habitat, const UserRequest& request, std::size_t size, Rng& rng,
                           double reuse_threshold) {
    if (habitat.pool.empty()) {
        throw BarrenHabitat();
    }
    Alphabet alphabet = Alphabet::from_agents(habitat.pool);
    for (const auto& seq : habitat.hosted) {
        for (const auto& a : seq.agents()) {
            alphabet.add(a);
        }
    }
    Population pop = initial_population(std::move(alphabet), size, rng);

    std::vector<std::pair<double, std::size_t>> reusable;
    for (std::size_t i = 0; i < habitat.hosted.size(); ++i) {
        const double f = fitness(habitat.hosted[i], request);
        if (f > reuse_threshold) {
            reusable.emplace_back(f, i);
        }
    }
    std::stable_sort(reusable.begin(), reusable.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t slot = 0; slot < reusable.size() && slot < pop.size(); ++slot) {
        pop.sequences[slot] = pop.encode(habitat.hosted[reusable[slot].second]);
    }
    return pop;
}

double hebbian_next(double p, bool success, const HebbianParams& params) {
    if (success) {
        return std::min(params.ceiling, p + params.reinforce * (1.0 - p));
    }
    return std::max(params.floor, p - params.decay * p);
}

void hebbian_update(Connection& connection, HabitatId from, bool success, const HebbianParams& params) {
    if (from != connection.a && from != connection.b) {
        throw ValidationError(fmt::format("habitat {} is not an endpoint", from));
    }
    auto& p = connection.probability(from);
    p = hebbian_next(p, success, params);
}

std::vector<MigrationEvent> deploy_and_migrate(HabitatNetwork& network, HabitatId origin,
                                               const AgentSequence& best, Rng& rng, std::size_t step) {
    network.habitat(origin).host(best);
    std::vector<MigrationEvent> events;
    for (auto& c : network.connections()) {
        if (c.a != origin && c.b != origin) {
            continue;
        }
        if (!rng.bernoulli(c.probability(origin))) {
            continue;
        }
        auto& neighbour = network.habitat(c.other(origin));
        const bool success = std::any_of(neighbour.recent.begin(), neighbour.recent.end(), [&](const UserRequest& r) {
            return fitness(best, r) > network.params().usefulness_threshold;
        });
        if (success) {
            neighbour.host(best);
        }
        hebbian_update(c, origin, success, network.params().hebbian);
        events.push_back(MigrationEvent{step, origin, neighbour.id, success, c.probability(origin)});
    }
    return events;
}

StepResult step_network(HabitatNetwork& network, std::span<const TargetedRequest> batch,
                        const EvolutionConfig& cfg, RngSeed step_seed, std::size_t step_index) {
    const auto& params = network.params();
    for (const auto& tr : batch) {
        network.habitat(tr.habitat).receive(tr.request, params.request_window);
    }
    StepResult out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& tr = batch[i];
        EvolutionConfig run_cfg = cfg;
        run_cfg.seed = derive_seed(step_seed, i);
        auto& home = network.habitat(tr.habitat);
        if (params.new_agent_rate > 0.0) {
            Rng fresh(derive_seed(run_cfg.seed, 2));
            if (fresh.bernoulli(params.new_agent_rate)) {
                home.pool.push_back(new_random_agent(fresh));
            }
        }
        Rng init(derive_seed(run_cfg.seed, 0));
        auto pop = seed_population(home, tr.request, run_cfg.base_population_size, init, params.reuse_threshold);
        auto result = run(run_cfg, std::vector<UserRequest>{tr.request}, std::move(pop));
        Rng migrate(derive_seed(run_cfg.seed, 1));
        auto events = deploy_and_migrate(network, tr.habitat, result.best, migrate, step_index);
        out.migrations.insert(out.migrations.end(), events.begin(), events.end());
        out.runs.push_back(RequestRun{tr.habitat, std::move(result.traces), std::move(result.best)});
    }
    return out;
}

HabitatNetwork small_world_network(std::size_t habitats, std::size_t neighbours, double rewire,
                                   std::size_t pool_size, Rng& rng, NetworkParams params,
                                   double initial_probability) {
    if (habitats < 2 || neighbours < 1 || neighbours >= habitats) {
        throw ValidationError("small-world network needs 2+ habitats and 1 <= neighbours < habitats");
    }
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    using Generator = boost::small_world_iterator<boost::minstd_rand, Graph>;
    boost::minstd_rand gen(static_cast<std::uint32_t>(rng.below(2147483646) + 1));

    HabitatNetwork net(params);
    for (std::size_t h = 0; h < habitats; ++h) {
        std::vector<Agent> pool;
        while (pool.size() < pool_size) {
            pool.push_back(new_random_agent(rng));
        }
        net.add_habitat(std::move(pool));
    }
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (Generator it(gen, habitats, neighbours, rewire), end; it != end; ++it) {
        auto [u, v] = *it;
        if (u != v) {
            edges.emplace(std::min(u, v), std::max(u, v));
        }
    }
    for (const auto& [u, v] : edges) {
        net.connect(u, v, initial_probability, initial_probability);
    }
    return net;
}

std::optional<std::size_t> generations_to_target(std::span<const GenerationTrace> traces, double target) {
    for (const auto& t : traces) {
        if (t.max_fitness >= target) {
            return t.generation;
        }
    }
    return std::nullopt;
}

SharingTrial sharing_trial(const SharingConfig& cfg, RngSeed seed) {
    if (cfg.services < 2) {
        throw ValidationError("sharing trial needs at least two services");
    }
    Rng rng(seed);
    const auto full = generate_request(cfg.services, cfg.modularity, rng);
    std::vector<std::vector<int>> part(full.services().begin(), full.services().end() - 1);
    const UserRequest sub(std::move(part));
    auto pool_a = provider_pool(full, cfg.pool_size, rng);
    auto pool_b = provider_pool(sub, cfg.pool_size, rng);

    EvolutionConfig evo = cfg.evolution;
    evo.track_complexity = false;
    const double target = cfg.target_fraction;  // providers make the optimum exact, so f_max = 1

    SharingTrial trial;
    for (const bool linked : {true, false}) {
        HabitatNetwork net(cfg.network);
        const auto a = net.add_habitat(pool_a);
        const auto b = net.add_habitat(pool_b);
        if (linked) {
            net.connect(a, b, cfg.connection_probability, cfg.connection_probability);
        }
        const std::vector<TargetedRequest> batch{{a, full}, {b, sub}};
        auto step = step_network(net, batch, evo, derive_seed(seed, 1), 0);
        const auto reached = generations_to_target(step.runs[1].traces, target);
        if (linked) {
            trial.shared = reached;
            trial.migrated = std::any_of(step.migrations.begin(), step.migrations.end(),
                                         [&](const MigrationEvent& e) { return e.to == b && e.success; });
            trial.migrations = std::move(step.migrations);
            trial.topology = net.connections();
        } else {
            trial.isolated = reached;
        }
    }
    return trial;
}

}  // namespace ecosim
