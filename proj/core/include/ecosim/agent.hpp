#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ecosim/recognizer.hpp"
#include "ecosim/semantic.hpp"

namespace ecosim {

// One step of an agent's migratory path: where it arrived, when, and how it
// fared there.
struct MigrationRecord {
    int habitat = -1;
    long arrival_step = 0;
    int uses = 0;
    int successes = 0;
};

// A habitat recommendation picked up from a similar agent's history during
// an interaction, kept until the agent has migration budget to spend on it.
struct AcquiredNiche {
    int habitat = -1;
    double success_rate = 0.0;
    long acquired_step = 0;
    SemanticDescription sharer;  // whose experience this was
};

// Evolvable stand-in for a software service. Instances are identified by id;
// migration works on copies, so an instance lives in exactly one pool.
// The embedded recognizer is shared between copies until one of them learns
// (copy-on-write), which keeps inherited behaviour identical at copy time.
struct Agent {
    std::uint64_t id = 0;
    SemanticDescription description;
    std::vector<MigrationRecord> history;
    std::vector<AcquiredNiche> acquired;
    int migration_counter = 0;
    int inbound_from = -1;  // habitat that passively delivered this copy, -1 = none
    std::shared_ptr<Recognizer> recognizer;

    MigrationRecord* record_for(int habitat) {
        for (auto it = history.rbegin(); it != history.rend(); ++it) {
            if (it->habitat == habitat) return &*it;
        }
        return nullptr;
    }

    const MigrationRecord* record_for(int habitat) const {
        return const_cast<Agent*>(this)->record_for(habitat);
    }

    bool visited(int habitat) const {
        for (const auto& r : history) {
            if (r.habitat == habitat) return true;
        }
        return false;
    }

    // Copy-on-write: clones the recognizer if other copies still share it,
    // then folds in the experience example.
    void learn(const SemanticDescription& other, bool visit_success, Rng& rng) {
        if (!recognizer) return;
        if (recognizer.use_count() > 1) {
            recognizer = std::shared_ptr<Recognizer>(recognizer->clone());
        }
        recognizer->extend(other, visit_success, rng);
    }
};

using AgentPtr = std::shared_ptr<Agent>;

}  // namespace ecosim
