#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ecosim/agent.hpp"
#include "ecosim/habitat.hpp"

namespace ecosim {

// Earned budget: one permitted targeted migration per execution in a
// response.
void on_execution(Agent& agent);

struct HistoryExchange {
    std::vector<int> for_arriver;   // habitats acquired by the arriving agent
    std::vector<int> for_resident;  // habitats acquired by the resident
};

// One-on-one interaction. Each side judges the other's description with its
// own recognizer; histories are exchanged only when both report similarity.
// A side's candidates are the partner's successfully visited habitats that
// the side has not visited itself. Returns nullopt when the gate fails.
std::optional<HistoryExchange> exchange_histories(const Agent& arriver, const Agent& resident);

// Spec-shaped surface: the candidates acquired by the arriver, if any.
std::optional<std::vector<int>> interact(const Agent& arriver, const Agent& resident);

// Picks the candidate with the best success rate in the sharing agent's
// history; ties break toward the most recent entry, then the lowest id.
int select_promising(std::span<const int> candidates,
                     std::span<const MigrationRecord> sharer_history);

// Files shared candidates into the receiver's acquired-niche memory,
// retaining the sharer's observed success rates. Bounded; the weakest
// recommendation is displaced first.
void remember_candidates(Agent& receiver, std::span<const int> candidates, const Agent& sharer,
                         long step, std::size_t memory_cap = 8);

// Best remembered habitat not yet visited, removing stale entries on the
// way. Returns nullopt when the memory holds nothing actionable.
std::optional<AcquiredNiche> take_most_promising(Agent& agent);

// Copy-based targeted move. Costs one unit of budget on both the original
// and the copy; refuses (returns nullptr) when the counter is exhausted.
// The destination does not need to be connected to the source.
AgentPtr targeted_migrate(Agent& agent, Habitat& dest, int source_habitat, long step,
                          std::uint64_t& next_id);

// Control variant: identical mechanics and budget, destination drawn
// uniformly over all other habitats.
AgentPtr random_migrate_control(Agent& agent, HabitatNetwork& net, int current_habitat,
                                long step, std::uint64_t& next_id, Rng& rng);

}  // namespace ecosim
