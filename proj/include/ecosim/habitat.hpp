#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "ecosim/core.hpp"
#include "ecosim/evolution.hpp"
#include "ecosim/rng.hpp"

namespace ecosim {

/// Seeding asked of a habitat with no agents.
class BarrenHabitat : public Error {
public:
    BarrenHabitat() : Error("barren habitat") {}
};

struct HebbianParams {
    double reinforce = 0.1;
    double decay = 0.1;
    double floor = 0.01;
    double ceiling = 0.99;

    void validate() const;
};

struct NetworkParams {
    HebbianParams hebbian{};
    double usefulness_threshold = 0.5;  // migration succeeds above this fitness
    double reuse_threshold = 0.5;       // hosted sequences above this are injected at seeding
    std::size_t request_window = 5;     // recent requests remembered per habitat
    double new_agent_rate = 0.0;        // chance per request of a fresh agent joining the pool

    void validate() const;
};

using HabitatId = std::size_t;

struct Habitat {
    HabitatId id = 0;
    std::vector<Agent> pool;
    std::vector<AgentSequence> hosted;
    std::deque<UserRequest> recent;

    void receive(const UserRequest& request, std::size_t window);
    /// Hosts `seq` unless an equal sequence is already hosted. Returns true if added.
    bool host(const AgentSequence& seq);
};

struct Connection {
    HabitatId a = 0;
    HabitatId b = 0;
    double p_ab = 0.0;
    double p_ba = 0.0;

    HabitatId other(HabitatId from) const { return from == a ? b : a; }
    double probability(HabitatId from) const { return from == a ? p_ab : p_ba; }
    double& probability(HabitatId from) { return from == a ? p_ab : p_ba; }
};

struct MigrationEvent {
    std::size_t step = 0;
    HabitatId from = 0;
    HabitatId to = 0;
    bool success = false;
    double p_after = 0.0;
};

class HabitatNetwork {
public:
    explicit HabitatNetwork(NetworkParams params = {});

    HabitatId add_habitat(std::vector<Agent> pool);
    /// Adds an edge; probabilities must lie in [0, 1].
    std::size_t connect(HabitatId a, HabitatId b, double p_ab, double p_ba);

    Habitat& habitat(HabitatId id) { return habitats_.at(id); }
    const Habitat& habitat(HabitatId id) const { return habitats_.at(id); }
    std::size_t size() const noexcept { return habitats_.size(); }

    std::vector<Connection>& connections() noexcept { return connections_; }
    const std::vector<Connection>& connections() const noexcept { return connections_; }
    const NetworkParams& params() const noexcept { return params_; }

    /// 0 when the two habitats are not connected.
    double probability(HabitatId from, HabitatId to) const;

    /// Edge list: a,b,p_ab,p_ba with a header row.
    void write_topology(std::ostream& out) const;

private:
    NetworkParams params_;
    std::vector<Habitat> habitats_;
    std::vector<Connection> connections_;
};

/// Generation 0 over the habitat's pool plus the agents of its hosted
/// sequences. Hosted sequences fitter than `reuse_threshold` against
/// `request` are placed verbatim in the first slots, fittest first.
Population seed_population(const Habitat& habitat, const UserRequest& request, std::size_t size, Rng& rng,
                           double reuse_threshold = 0.5);

/// p' = min(ceiling, p + reinforce (1 - p)) on success, max(floor, p - decay p) on failure.
double hebbian_next(double p, bool success, const HebbianParams& params);
void hebbian_update(Connection& connection, HabitatId from, bool success, const HebbianParams& params);

/// Hosts `best` at `origin`, then tries every connection in order: with the
/// outgoing probability the sequence is copied across and judged against the
/// neighbour's recent requests. Each attempt updates that direction.
std::vector<MigrationEvent> deploy_and_migrate(HabitatNetwork& network, HabitatId origin,
                                               const AgentSequence& best, Rng& rng, std::size_t step = 0);

struct TargetedRequest {
    HabitatId habitat = 0;
    UserRequest request;
};

struct RequestRun {
    HabitatId habitat = 0;
    std::vector<GenerationTrace> traces;
    AgentSequence best;
};

struct StepResult {
    std::vector<RequestRun> runs;
    std::vector<MigrationEvent> migrations;
};

/// All requests join their habitat's window first, then each in batch order is
/// seeded, evolved, deployed and migrated. Request i evolves with seed
/// derive_seed(step_seed, i), so an unconnected habitat without hosted
/// sequences reproduces a standalone run exactly.
StepResult step_network(HabitatNetwork& network, std::span<const TargetedRequest> batch,
                        const EvolutionConfig& cfg, RngSeed step_seed, std::size_t step_index = 0);

/// Ring of `habitats` nodes, each joined to `neighbours` nearest, edges
/// rewired with probability `rewire`; every habitat gets `pool_size` random agents.
HabitatNetwork small_world_network(std::size_t habitats, std::size_t neighbours, double rewire,
                                   std::size_t pool_size, Rng& rng, NetworkParams params = {},
                                   double initial_probability = 0.5);

/// First generation whose max fitness reaches `target`.
std::optional<std::size_t> generations_to_target(std::span<const GenerationTrace> traces, double target);

struct SharingConfig {
    EvolutionConfig evolution{};
    std::size_t services = 4;
    std::size_t modularity = 2;
    std::size_t pool_size = 20;
    double connection_probability = 0.5;
    double target_fraction = 0.95;
    NetworkParams network{};
};

struct SharingTrial {
    std::optional<std::size_t> shared;    // second habitat, connected to the first
    std::optional<std::size_t> isolated;  // same habitat and seeds, no neighbour
    bool migrated = false;
    std::vector<MigrationEvent> migrations;
    std::vector<Connection> topology;  // connected network after the trial
};

/// Habitat A solves request R, then habitat B solves a sub-request of R that
/// was pending while A ran. Played twice with identical seeds: with A and B
/// connected, and with no connection.
SharingTrial sharing_trial(const SharingConfig& cfg, RngSeed seed);

}  // namespace ecosim
