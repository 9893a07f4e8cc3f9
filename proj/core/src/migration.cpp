#include "ecosim/migration.hpp"
#include <algorithm>

#include <stdexcept>

namespace ecosim {

void on_execution(Agent& agent) { agent.migration_counter += 1; }

namespace {

std::vector<int> candidates_from(const Agent& sharer, const Agent& receiver) {
    std::vector<int> out;
    for (const auto& record : sharer.history) {
        if (record.successes >= 1 && !receiver.visited(record.habitat) &&
            std::find(out.begin(), out.end(), record.habitat) == out.end()) {
            out.push_back(record.habitat);
        }
    }
    return out;
}

}  // namespace

std::optional<HistoryExchange> exchange_histories(const Agent& arriver, const Agent& resident) {
    if (!arriver.recognizer || !resident.recognizer) {
        throw std::logic_error("interaction requires recognizers on both agents");
    }
    // Each agent decides for itself; histories move only on mutual agreement.
    if (!arriver.recognizer->is_similar(resident.description)) return std::nullopt;
    if (!resident.recognizer->is_similar(arriver.description)) return std::nullopt;
    return HistoryExchange{candidates_from(resident, arriver),
                           candidates_from(arriver, resident)};
}

std::optional<std::vector<int>> interact(const Agent& arriver, const Agent& resident) {
    auto exchange = exchange_histories(arriver, resident);
    if (!exchange) return std::nullopt;
    return std::move(exchange->for_arriver);
}

int select_promising(std::span<const int> candidates,
                     std::span<const MigrationRecord> sharer_history) {
    if (candidates.empty()) throw std::invalid_argument("no candidate habitats");
    int best = -1;
    double best_rate = -1.0;
    long best_step = -1;
    for (int habitat : candidates) {
        // A history may hold several entries for one habitat (inherited plus
        // own arrival); the success rate aggregates them.
        long uses = 0;
        long successes = 0;
        long last_arrival = -1;
        for (const auto& record : sharer_history) {
            if (record.habitat != habitat) continue;
            uses += record.uses;
            successes += record.successes;
            last_arrival = std::max(last_arrival, record.arrival_step);
        }
        if (uses <= 0) continue;
        const double rate = static_cast<double>(successes) / static_cast<double>(uses);
        const bool better = rate > best_rate ||
                            (rate == best_rate && last_arrival > best_step) ||
                            (rate == best_rate && last_arrival == best_step && habitat < best);
        if (better) {
            best = habitat;
            best_rate = rate;
            best_step = last_arrival;
        }
    }
    if (best < 0) throw std::invalid_argument("candidates missing from the sharer's history");
    return best;
}

void remember_candidates(Agent& receiver, std::span<const int> candidates, const Agent& sharer,
                         long step, std::size_t memory_cap) {
    for (int habitat : candidates) {
        if (receiver.visited(habitat)) continue;
        long uses = 0;
        long successes = 0;
        for (const auto& record : sharer.history) {
            if (record.habitat != habitat) continue;
            uses += record.uses;
            successes += record.successes;
        }
        if (uses <= 0) continue;
        const double rate = static_cast<double>(successes) / static_cast<double>(uses);

        bool updated = false;
        for (auto& niche : receiver.acquired) {
            if (niche.habitat == habitat) {
                if (rate >= niche.success_rate) {
                    niche = {habitat, rate, step, sharer.description};
                }
                updated = true;
                break;
            }
        }
        if (updated) continue;
        if (receiver.acquired.size() < memory_cap) {
            receiver.acquired.push_back({habitat, rate, step, sharer.description});
            continue;
        }
        auto weakest = receiver.acquired.begin();
        for (auto it = receiver.acquired.begin(); it != receiver.acquired.end(); ++it) {
            if (it->success_rate < weakest->success_rate ||
                (it->success_rate == weakest->success_rate &&
                 it->acquired_step < weakest->acquired_step)) {
                weakest = it;
            }
        }
        if (rate > weakest->success_rate) {
            *weakest = {habitat, rate, step, sharer.description};
        }
    }
}

std::optional<AcquiredNiche> take_most_promising(Agent& agent) {
    while (!agent.acquired.empty()) {
        auto best = agent.acquired.begin();
        for (auto it = agent.acquired.begin(); it != agent.acquired.end(); ++it) {
            const bool better = it->success_rate > best->success_rate ||
                                (it->success_rate == best->success_rate &&
                                 it->acquired_step > best->acquired_step) ||
                                (it->success_rate == best->success_rate &&
                                 it->acquired_step == best->acquired_step &&
                                 it->habitat < best->habitat);
            if (better) best = it;
        }
        AcquiredNiche chosen = *best;
        agent.acquired.erase(best);
        if (!agent.visited(chosen.habitat)) return chosen;
    }
    return std::nullopt;
}

AgentPtr targeted_migrate(Agent& agent, Habitat& dest, int source_habitat, long step,
                          std::uint64_t& next_id) {
    if (agent.migration_counter < 1) return nullptr;  // budget exhausted, not an error
    const int remaining = agent.migration_counter - 1;
    agent.migration_counter = remaining;
    auto copy = copy_agent_into(agent, dest, step, next_id, /*inbound_from=*/-1, remaining);
    (void)source_habitat;
    return copy;
}

AgentPtr random_migrate_control(Agent& agent, HabitatNetwork& net, int current_habitat,
                                long step, std::uint64_t& next_id, Rng& rng) {
    if (agent.migration_counter < 1) return nullptr;
    const auto n = static_cast<std::size_t>(net.size());
    std::size_t pick = rng.index(n - 1);
    if (pick >= static_cast<std::size_t>(current_habitat)) ++pick;
    const int remaining = agent.migration_counter - 1;
    agent.migration_counter = remaining;
    auto copy = copy_agent_into(agent, net.habitat(static_cast<int>(pick)), step, next_id,
                                /*inbound_from=*/-1, remaining);
    return copy;
}

}  // namespace ecosim
