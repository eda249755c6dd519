#pragma once

#include <cstddef>
#include <vector>

#include "ecosim/core.hpp"
#include "ecosim/rng.hpp"

namespace ecosim {

struct Scenario {
    UserRequest request;
    std::vector<Agent> pool;
};

/// One provider per service group, carrying exactly that group's attributes,
/// then random agents until the pool holds `pool_size` agents.
std::vector<Agent> provider_pool(const UserRequest& request, std::size_t pool_size, Rng& rng);

/// Single-optimum request of `services` one-attribute groups r_1..r_n. Provider
/// j carries {r_j, r_{j+1} + 1} (cyclic), so losing any one provider costs a
/// distance of exactly 1. The draw is repeated until no three pool agents
/// reach fitness 0.1.
Scenario single_optimum_scenario(RngSeed seed, std::size_t services = 8, std::size_t pool_size = 20);

struct TwoOptimaScenario {
    std::vector<Agent> pool;  // 15 distinct agents
    UserRequest first;        // served by agents 0 and 1 (attributes in [1, 50])
    UserRequest second;       // served by agents 7 and 8 (attributes in [51, 100])
};

/// Two independent optima over disjoint halves of a 15-agent alphabet.
TwoOptimaScenario two_optima_scenario(RngSeed seed);

}  // namespace ecosim
