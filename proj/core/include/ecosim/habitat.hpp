#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ecosim/agent.hpp"
#include "ecosim/evolution.hpp"
#include "ecosim/rng.hpp"

namespace ecosim {

struct UsageStats {
    long uses = 0;
    long successes = 0;
};

// A solved request kept for seeding later populations: the request's centroid
// plus the best sequence evolved for it.
struct StoredSolution {
    std::vector<AttributeTuple> centroid;
    AgentSequence sequence;
};

// Per-user node hosting an agent pool. Pools only grow at this scale; there
// is no eviction unless a cap is configured.
struct Habitat {
    int id = -1;
    int user = -1;
    std::vector<AgentPtr> pool;
    std::vector<StoredSolution> solutions;
    std::unordered_map<std::uint64_t, UsageStats> usage;
    std::unordered_set<std::uint64_t> member_ids;

    bool hosts(std::uint64_t agent_id) const { return member_ids.count(agent_id) != 0; }
};

// Bidirectional link with an independent migration probability per direction.
struct Connection {
    int from = -1;
    int to = -1;
    double p_forward = 0.5;   // from -> to
    double p_backward = 0.5;  // to -> from
};

struct NetworkParams {
    int degree = 4;
    double p_init = 0.5;
    double p_min = 0.05;
    double p_max = 0.95;
    double eta = 0.1;
    // Optional wear per delivery, as a fraction of a failure update:
    // deliveries that never pay off leave the connection weaker, successful
    // ones more than recover through the usage feedback. Off by default so
    // passive migration alone leaves probabilities untouched.
    double delivery_decay = 0.0;
};

// Reinforcement step for one direction of a connection: success moves the
// probability toward p_max, failure toward p_min. Stays inside [p_min, p_max].
void hebbian_update(Connection& connection, bool forward, bool success,
                    const NetworkParams& params);

class HabitatNetwork {
public:
    // Wires each habitat to `degree` distinct random peers; probabilities
    // start at p_init in both directions.
    static HabitatNetwork random(int n_habitats, const NetworkParams& params, Rng& rng);

    // Habitats only; callers add connections explicitly.
    static HabitatNetwork unconnected(int n_habitats, const NetworkParams& params);

    int size() const { return static_cast<int>(habitats_.size()); }
    Habitat& habitat(int id) { return habitats_[static_cast<std::size_t>(id)]; }
    const Habitat& habitat(int id) const { return habitats_[static_cast<std::size_t>(id)]; }

    std::span<const Connection> connections() const { return connections_; }
    const NetworkParams& params() const { return params_; }

    // Indexes of connections touching `id`.
    std::span<const std::size_t> adjacent(int id) const {
        return adjacency_[static_cast<std::size_t>(id)];
    }
    std::vector<int> neighbors(int id) const;
    bool connected(int a, int b) const;

    // Migration probability along a -> b; throws when no connection exists.
    double probability(int from, int to) const;

    // Hebbian update of the direction from -> to.
    void reinforce(int from, int to, bool success);

    void add_connection(int a, int b);

private:
    std::vector<Habitat> habitats_;
    std::vector<Connection> connections_;
    std::vector<std::vector<std::size_t>> adjacency_;
    NetworkParams params_;
};

// Mean local clustering coefficient over all nodes, probabilities ignored.
// Nodes with fewer than two neighbours contribute zero.
double clustering_coefficient(const HabitatNetwork& net);

// Places an agent in the habitat's pool and opens its migration record
// there. Deploying the same instance twice is an error.
void deploy_agent(Habitat& habitat, AgentPtr agent, long step);

enum class MigrationKind { passive, targeted, control };

struct ArrivalEvent {
    AgentPtr agent;
    int habitat = -1;
    int source = -1;
    MigrationKind kind = MigrationKind::passive;
};

// Copies an agent into a destination pool. Shared by the passive, targeted
// and control paths; history gains an arrival entry for the destination.
AgentPtr copy_agent_into(const Agent& original, Habitat& dest, long step,
                         std::uint64_t& next_id, int inbound_from, int counter);

// Spreads a copy of the agent along each outgoing connection with the
// connection's probability. The original stays where it is; copies carry
// the agent's current migration budget.
std::vector<ArrivalEvent> passive_migrate(HabitatNetwork& net, const Agent& agent, int from,
                                          long step, std::uint64_t& next_id, Rng& rng);

// Sequence variant: one coin per connection; on success every distinct
// member is copied over together and the solution travels with them.
std::vector<ArrivalEvent> passive_migrate(HabitatNetwork& net, const AgentSequence& sequence,
                                          const std::vector<AttributeTuple>& centroid, int from,
                                          long step, std::uint64_t& next_id, Rng& rng);

// Updates the habitat's usage log and the agent's migration record, and
// reinforces the inbound connection that delivered the agent (if any).
// The agent must live in the habitat's pool.
void record_usage(HabitatNetwork& net, Habitat& habitat, Agent& agent, bool success);

}  // namespace ecosim
