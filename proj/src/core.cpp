#include "ecosim/core.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace ecosim {

namespace {

void check_attribute(int value) {
    if (value < kMinAttribute || value > kMaxAttribute) {
        throw ValidationError(fmt::format("attribute {} outside [{}, {}]", value, kMinAttribute,
                                          kMaxAttribute));
    }
}

}  // namespace

Agent::Agent(std::vector<int> attributes) : attributes_(std::move(attributes)) {
    if (attributes_.empty()) {
        throw ValidationError("agent needs at least one attribute");
    }
    for (int a : attributes_) {
        check_attribute(a);
    }
    key_ = attributes_;
    std::sort(key_.begin(), key_.end());
}

Agent new_random_agent(Rng& rng) {
    const int count = rng.uniform_int(3, 6);
    std::vector<int> attrs(static_cast<std::size_t>(count));
    for (auto& a : attrs) {
        a = rng.uniform_int(kMinAttribute, kMaxAttribute);
    }
    return Agent(std::move(attrs));
}

AgentSequence::AgentSequence(std::vector<Agent> agents) : agents_(std::move(agents)) {
    if (agents_.empty()) {
        throw ValidationError("agent sequence must not be empty");
    }
}

Alphabet Alphabet::from_agents(std::span<const Agent> agents) {
    Alphabet out;
    for (const auto& a : agents) {
        out.add(a);
    }
    return out;
}

AgentIndex Alphabet::add(const Agent& agent) {
    auto [it, inserted] = index_.try_emplace(agent.key(), static_cast<AgentIndex>(members_.size()));
    if (inserted) {
        members_.push_back(agent);
    }
    return it->second;
}

std::optional<AgentIndex> Alphabet::find(const Agent& agent) const {
    if (auto it = index_.find(agent.key()); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

bool Alphabet::same_members(const Alphabet& other) const {
    if (size() != other.size()) {
        return false;
    }
    return std::all_of(members_.begin(), members_.end(),
                       [&](const Agent& a) { return other.contains(a); });
}

std::size_t Population::max_length() const noexcept {
    std::size_t m = 0;
    for (const auto& s : sequences) {
        m = std::max(m, s.size());
    }
    return m;
}

double Population::mean_length() const {
    if (sequences.empty()) {
        return 0.0;
    }
    std::size_t total = 0;
    for (const auto& s : sequences) {
        total += s.size();
    }
    return static_cast<double>(total) / static_cast<double>(sequences.size());
}

AgentSequence Population::materialize(std::size_t i) const {
    std::vector<Agent> agents;
    agents.reserve(sequences.at(i).size());
    for (AgentIndex a : sequences[i]) {
        agents.push_back(alphabet[a]);
    }
    return AgentSequence(std::move(agents));
}

Genome Population::encode(const AgentSequence& seq) {
    Genome g;
    g.reserve(seq.size());
    for (const auto& a : seq.agents()) {
        g.push_back(alphabet.add(a));
    }
    return g;
}

void Population::validate() const {
    if (alphabet.empty()) {
        throw ValidationError("population alphabet is empty");
    }
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        if (sequences[i].empty()) {
            throw ValidationError(fmt::format("sequence {} is empty", i));
        }
        for (AgentIndex a : sequences[i]) {
            if (a >= alphabet.size()) {
                throw ValidationError(fmt::format("sequence {} uses agent {} outside alphabet", i, a));
            }
        }
    }
}

bool same_population(const Population& a, const Population& b) {
    if (a.size() != b.size() || !a.alphabet.same_members(b.alphabet)) {
        return false;
    }
    auto keys = [](const Population& p) {
        std::vector<std::vector<std::vector<int>>> out;
        out.reserve(p.size());
        for (const auto& g : p.sequences) {
            std::vector<std::vector<int>> s;
            s.reserve(g.size());
            for (AgentIndex i : g) {
                s.push_back(p.alphabet[i].key());
            }
            out.push_back(std::move(s));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return keys(a) == keys(b);
}

UserRequest::UserRequest(std::vector<std::vector<int>> services) : services_(std::move(services)) {
    if (services_.empty()) {
        throw ValidationError("user request needs at least one service group");
    }
    for (const auto& group : services_) {
        if (group.empty()) {
            throw ValidationError("service group needs at least one attribute");
        }
        for (int r : group) {
            check_attribute(r);
            flat_.push_back(r);
        }
    }
}

std::size_t UserRequest::modularity() const noexcept {
    std::size_t m = 0;
    for (const auto& g : services_) {
        m = std::max(m, g.size());
    }
    return m;
}

}  // namespace ecosim
