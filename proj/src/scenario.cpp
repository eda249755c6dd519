#include "ecosim/scenario.hpp"

#include <cstdlib>

#include "ecosim/evolution.hpp"
#include "ecosim/stability.hpp"

namespace ecosim {

std::vector<Agent> provider_pool(const UserRequest& request, std::size_t pool_size, Rng& rng) {
    std::vector<Agent> pool;
    for (const auto& group : request.services()) {
        pool.emplace_back(group);
    }
    while (pool.size() < pool_size) {
        pool.push_back(new_random_agent(rng));
    }
    return pool;
}

Scenario single_optimum_scenario(RngSeed seed, std::size_t services, std::size_t pool_size) {
    if (services < 4 || services > 24) {
        throw ValidationError("single-optimum scenario needs 4 to 24 services");
    }
    Rng rng(seed);
    for (;;) {
        std::vector<int> required;
        while (required.size() < services) {
            const int v = rng.uniform_int(kMinAttribute, kMaxAttribute - 1);
            bool spaced = true;
            for (int r : required) {
                spaced = spaced && std::abs(r - v) >= 3;
            }
            if (spaced) {
                required.push_back(v);
            }
        }
        std::vector<std::vector<int>> groups;
        std::vector<Agent> pool;
        for (std::size_t j = 0; j < services; ++j) {
            groups.push_back({required[j]});
            pool.emplace_back(std::vector<int>{required[j], required[(j + 1) % services] + 1});
        }
        while (pool.size() < pool_size) {
            pool.push_back(new_random_agent(rng));
        }
        UserRequest request(std::move(groups));
        const FitnessTable table(Alphabet::from_agents(pool), request);
        if (best_distance_within(table, 3) >= 10) {
            return Scenario{std::move(request), std::move(pool)};
        }
    }
}

TwoOptimaScenario two_optima_scenario(RngSeed seed) {
    Rng rng(seed);
    Alphabet seen;
    std::vector<Agent> pool;
    while (pool.size() < 15) {
        const bool low = pool.size() < 7;
        std::vector<int> attrs(static_cast<std::size_t>(rng.uniform_int(3, 6)));
        for (auto& a : attrs) {
            a = low ? rng.uniform_int(1, 50) : rng.uniform_int(51, 100);
        }
        Agent agent(std::move(attrs));
        if (!seen.contains(agent)) {
            seen.add(agent);
            pool.push_back(std::move(agent));
        }
    }
    UserRequest first({pool[0].attributes(), pool[1].attributes()});
    UserRequest second({pool[7].attributes(), pool[8].attributes()});
    return TwoOptimaScenario{std::move(pool), std::move(first), std::move(second)};
}

}  // namespace ecosim
