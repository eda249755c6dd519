#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecosim/rng.hpp"

namespace ecosim {

inline constexpr int kMinAttribute = 1;
inline constexpr int kMaxAttribute = 100;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violating a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An atomic service: a non-empty list of semantic attributes in [1, 100].
///
/// Two agents are the same alphabet character when their attribute lists are
/// equal as multisets; the stored order is kept for display only.
class Agent {
public:
    explicit Agent(std::vector<int> attributes);

    const std::vector<int>& attributes() const noexcept { return attributes_; }
    std::size_t size() const noexcept { return attributes_.size(); }

    /// Sorted attribute list; the identity key.
    const std::vector<int>& key() const noexcept { return key_; }

    friend bool operator==(const Agent& a, const Agent& b) { return a.key_ == b.key_; }
    friend auto operator<=>(const Agent& a, const Agent& b) { return a.key_ <=> b.key_; }

private:
    std::vector<int> attributes_;
    std::vector<int> key_;
};

/// Agent with 3 to 6 attributes, each uniform in [1, 100].
Agent new_random_agent(Rng& rng);

/// Ordered, non-empty composition of agents (a candidate application).
class AgentSequence {
public:
    explicit AgentSequence(std::vector<Agent> agents);

    const std::vector<Agent>& agents() const noexcept { return agents_; }
    std::size_t size() const noexcept { return agents_.size(); }

    friend bool operator==(const AgentSequence&, const AgentSequence&) = default;

private:
    std::vector<Agent> agents_;
};

using AgentIndex = std::uint32_t;

/// Finite set of distinct agents; characters are addressed by insertion index.
class Alphabet {
public:
    Alphabet() = default;

    /// Builds an alphabet from `agents`, dropping duplicates (first occurrence wins).
    static Alphabet from_agents(std::span<const Agent> agents);

    /// Returns the index of `agent`, inserting it if new.
    AgentIndex add(const Agent& agent);

    std::optional<AgentIndex> find(const Agent& agent) const;
    bool contains(const Agent& agent) const { return find(agent).has_value(); }

    const Agent& operator[](AgentIndex i) const { return members_.at(i); }
    const std::vector<Agent>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    /// Set equality, ignoring insertion order.
    bool same_members(const Alphabet& other) const;

private:
    std::vector<Agent> members_;
    std::map<std::vector<int>, AgentIndex> index_;
};

/// A sequence expressed as indices into a population's alphabet.
using Genome = std::vector<AgentIndex>;

/// Multiset of sequences over an alphabet. The unit every metric consumes.
struct Population {
    Alphabet alphabet;
    std::vector<Genome> sequences;

    std::size_t size() const noexcept { return sequences.size(); }
    std::size_t max_length() const noexcept;
    double mean_length() const;

    AgentSequence materialize(std::size_t i) const;

    /// Re-expresses `seq` over this population's alphabet, adding missing agents.
    Genome encode(const AgentSequence& seq);

    /// Throws ValidationError on empty sequences or out-of-alphabet indices.
    void validate() const;
};

/// Multiset equality of the sequences (as agent lists) plus alphabet set equality.
bool same_population(const Population& a, const Population& b);

/// A user request: groups of required attributes, one group per atomic service.
class UserRequest {
public:
    explicit UserRequest(std::vector<std::vector<int>> services);

    const std::vector<std::vector<int>>& services() const noexcept { return services_; }
    /// Number of atomic-service groups.
    std::size_t length() const noexcept { return services_.size(); }
    /// Attributes in the widest group.
    std::size_t modularity() const noexcept;
    /// The required-attribute set {r1, r2, ...}, in group order.
    const std::vector<int>& flattened() const noexcept { return flat_; }

    friend bool operator==(const UserRequest& a, const UserRequest& b) {
        return a.services_ == b.services_;
    }

private:
    std::vector<std::vector<int>> services_;
    std::vector<int> flat_;
};

}  // namespace ecosim
