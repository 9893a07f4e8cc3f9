#include "ecosim/habitat.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecosim {

void hebbian_update(Connection& connection, bool forward, bool success,
                    const NetworkParams& params) {
    double& p = forward ? connection.p_forward : connection.p_backward;
    if (success) {
        p += params.eta * (params.p_max - p);
    } else {
        p -= params.eta * (p - params.p_min);
    }
    p = std::clamp(p, params.p_min, params.p_max);
}

HabitatNetwork HabitatNetwork::unconnected(int n_habitats, const NetworkParams& params) {
    if (n_habitats < 2) throw std::invalid_argument("need at least two habitats");
    HabitatNetwork net;
    net.params_ = params;
    net.habitats_.resize(static_cast<std::size_t>(n_habitats));
    net.adjacency_.resize(static_cast<std::size_t>(n_habitats));
    for (int i = 0; i < n_habitats; ++i) {
        net.habitats_[static_cast<std::size_t>(i)].id = i;
        net.habitats_[static_cast<std::size_t>(i)].user = i;
    }
    return net;
}

HabitatNetwork HabitatNetwork::random(int n_habitats, const NetworkParams& params, Rng& rng) {
    if (params.degree >= n_habitats) {
        throw std::invalid_argument("initial degree must be below the habitat count");
    }
    HabitatNetwork net = unconnected(n_habitats, params);
    for (int i = 0; i < n_habitats; ++i) {
        int wired = 0;
        int guard = 0;
        while (wired < params.degree && guard++ < 64 * n_habitats) {
            const int peer = static_cast<int>(rng.index(static_cast<std::size_t>(n_habitats)));
            if (peer == i || net.connected(i, peer)) continue;
            net.add_connection(i, peer);
            ++wired;
        }
    }
    return net;
}

void HabitatNetwork::add_connection(int a, int b) {
    if (a == b) throw std::invalid_argument("self-loops are not allowed");
    if (connected(a, b)) throw std::invalid_argument("duplicate connection");
    Connection c;
    c.from = a;
    c.to = b;
    c.p_forward = params_.p_init;
    c.p_backward = params_.p_init;
    connections_.push_back(c);
    adjacency_[static_cast<std::size_t>(a)].push_back(connections_.size() - 1);
    adjacency_[static_cast<std::size_t>(b)].push_back(connections_.size() - 1);
}

std::vector<int> HabitatNetwork::neighbors(int id) const {
    std::vector<int> out;
    for (std::size_t idx : adjacency_[static_cast<std::size_t>(id)]) {
        const auto& c = connections_[idx];
        out.push_back(c.from == id ? c.to : c.from);
    }
    return out;
}

bool HabitatNetwork::connected(int a, int b) const {
    for (std::size_t idx : adjacency_[static_cast<std::size_t>(a)]) {
        const auto& c = connections_[idx];
        if ((c.from == a && c.to == b) || (c.from == b && c.to == a)) return true;
    }
    return false;
}

double HabitatNetwork::probability(int from, int to) const {
    for (std::size_t idx : adjacency_[static_cast<std::size_t>(from)]) {
        const auto& c = connections_[idx];
        if (c.from == from && c.to == to) return c.p_forward;
        if (c.to == from && c.from == to) return c.p_backward;
    }
    throw std::invalid_argument("habitats are not connected: " + std::to_string(from) + " -> " +
                                std::to_string(to));
}

void HabitatNetwork::reinforce(int from, int to, bool success) {
    for (std::size_t idx : adjacency_[static_cast<std::size_t>(from)]) {
        auto& c = connections_[idx];
        if (c.from == from && c.to == to) {
            hebbian_update(c, true, success, params_);
            return;
        }
        if (c.to == from && c.from == to) {
            hebbian_update(c, false, success, params_);
            return;
        }
    }
    throw std::invalid_argument("habitats are not connected: " + std::to_string(from) + " -> " +
                                std::to_string(to));
}

double clustering_coefficient(const HabitatNetwork& net) {
    const int n = net.size();
    if (n < 3) throw std::invalid_argument("clustering coefficient needs at least three nodes");
    double sum = 0.0;
    for (int v = 0; v < n; ++v) {
        const auto nbrs = net.neighbors(v);
        const std::size_t k = nbrs.size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (net.connected(nbrs[i], nbrs[j])) ++links;
            }
        }
        sum += 2.0 * static_cast<double>(links) / (static_cast<double>(k) *
                                                   static_cast<double>(k - 1));
    }
    return sum / static_cast<double>(n);
}

void deploy_agent(Habitat& habitat, AgentPtr agent, long step) {
    if (!agent) throw std::invalid_argument("cannot deploy a null agent");
    require_agent_sized(agent->description);
    if (habitat.hosts(agent->id)) {
        throw std::invalid_argument("agent instance " + std::to_string(agent->id) +
                                    " is already deployed at habitat " +
                                    std::to_string(habitat.id));
    }
    agent->history.push_back({habitat.id, step, 0, 0});
    habitat.member_ids.insert(agent->id);
    habitat.pool.push_back(std::move(agent));
}

AgentPtr copy_agent_into(const Agent& original, Habitat& dest, long step,
                         std::uint64_t& next_id, int inbound_from, int counter) {
    auto copy = std::make_shared<Agent>();
    copy->id = next_id++;
    copy->description = original.description;
    copy->history = original.history;
    copy->history.push_back({dest.id, step, 0, 0});
    copy->acquired = original.acquired;
    copy->migration_counter = counter;
    copy->inbound_from = inbound_from;
    copy->recognizer = original.recognizer;  // shared until either side learns
    dest.member_ids.insert(copy->id);
    dest.pool.push_back(copy);
    return copy;
}

namespace {

void charge_delivery(HabitatNetwork& net, std::size_t conn_index, bool forward) {
    auto& c = const_cast<Connection&>(net.connections()[conn_index]);
    const auto& params = net.params();
    double& p = forward ? c.p_forward : c.p_backward;
    p -= params.delivery_decay * params.eta * (p - params.p_min);
    p = std::clamp(p, params.p_min, params.p_max);
}

}  // namespace

std::vector<ArrivalEvent> passive_migrate(HabitatNetwork& net, const Agent& agent, int from,
                                          long step, std::uint64_t& next_id, Rng& rng) {
    std::vector<ArrivalEvent> arrivals;
    for (std::size_t idx : net.adjacent(from)) {
        const auto& c = net.connections()[idx];
        const int to = c.from == from ? c.to : c.from;
        const double p = c.from == from ? c.p_forward : c.p_backward;
        if (!rng.chance(p)) continue;
        charge_delivery(net, idx, c.from == from);
        auto copy = copy_agent_into(agent, net.habitat(to), step, next_id, from,
                                    agent.migration_counter);
        arrivals.push_back({std::move(copy), to, from, MigrationKind::passive});
    }
    return arrivals;
}

std::vector<ArrivalEvent> passive_migrate(HabitatNetwork& net, const AgentSequence& sequence,
                                          const std::vector<AttributeTuple>& centroid, int from,
                                          long step, std::uint64_t& next_id, Rng& rng) {
    std::vector<ArrivalEvent> arrivals;
    for (std::size_t idx : net.adjacent(from)) {
        const auto& c = net.connections()[idx];
        const int to = c.from == from ? c.to : c.from;
        const double p = c.from == from ? c.p_forward : c.p_backward;
        if (!rng.chance(p)) continue;
        charge_delivery(net, idx, c.from == from);
        Habitat& dest = net.habitat(to);
        // The sequence travels as a unit: all distinct members land together
        // and the solution becomes seedable at the destination.
        std::vector<std::uint64_t> seen;
        std::vector<AgentPtr> dest_members;
        for (const auto& member : sequence.members()) {
            const auto it = std::find(seen.begin(), seen.end(), member->id);
            if (it != seen.end()) {
                dest_members.push_back(dest_members[static_cast<std::size_t>(it - seen.begin())]);
                continue;
            }
            auto copy = copy_agent_into(*member, dest, step, next_id, from,
                                        member->migration_counter);
            arrivals.push_back({copy, to, from, MigrationKind::passive});
            seen.push_back(member->id);
            dest_members.push_back(std::move(copy));
        }
        dest.solutions.push_back({centroid, AgentSequence(std::move(dest_members))});
    }
    return arrivals;
}

void record_usage(HabitatNetwork& net, Habitat& habitat, Agent& agent, bool success) {
    if (!habitat.hosts(agent.id)) {
        throw std::invalid_argument("agent " + std::to_string(agent.id) +
                                    " is not hosted at habitat " + std::to_string(habitat.id));
    }
    auto& stats = habitat.usage[agent.id];
    stats.uses += 1;
    if (success) stats.successes += 1;

    MigrationRecord* record = agent.record_for(habitat.id);
    if (record != nullptr) {
        record->uses += 1;
        if (success) record->successes += 1;
    }

    if (agent.inbound_from >= 0 && net.connected(agent.inbound_from, habitat.id)) {
        net.reinforce(agent.inbound_from, habitat.id, success);
    }
}

}  // namespace ecosim
