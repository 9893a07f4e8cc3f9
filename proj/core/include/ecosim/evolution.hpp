#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ecosim/agent.hpp"
#include "ecosim/rng.hpp"
#include "ecosim/semantic.hpp"

namespace ecosim {

struct EvolutionParams {
    int base_size = 20;
    double size_coeff = 10.0;
    double crossover_fraction = 0.10;
    double mutation_fraction = 0.10;
    int max_generations = 100;
    double id_mismatch_penalty = 100.0;  // weight of |r.id - a.id| in the tuple distance
    double stored_seed_threshold = 0.2;  // centroid difference under which past solutions seed
    int seed_length_max = 3;
};

// Ordered composition of agents; the individual of evolution. The
// concatenated attribute tuples of its members are cached for fitness
// evaluation.
class AgentSequence {
public:
    AgentSequence() = default;
    explicit AgentSequence(std::vector<AgentPtr> members);

    const std::vector<AgentPtr>& members() const { return members_; }
    std::size_t length() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const std::vector<AttributeTuple>& attributes() const { return attributes_; }

    void insert(std::size_t position, AgentPtr agent);
    void replace(std::size_t position, AgentPtr agent);
    void erase(std::size_t position);

private:
    void rebuild_attributes();

    std::vector<AgentPtr> members_;
    std::vector<AttributeTuple> attributes_;
};

// 1 / (1 + sum over request tuples of the closest sequence-attribute
// distance), where d(r, a) = penalty * |r.id - a.id| + |r.value - a.value|.
double sequence_fitness(const AgentSequence& sequence, std::span<const AttributeTuple> request,
                        double id_mismatch_penalty = 100.0);

// Longer-than-average individuals lose fitness proportionally; shorter ones
// gain nothing.
double parsimony_adjust(double fitness, std::size_t length, double average_length);

// round(base_size + size_coeff * average_length)
int population_size(double average_length, const EvolutionParams& params);

// Fitness-proportional sampling with replacement down/up to target size.
// All-zero weights fall back to uniform sampling. Non-elitist: nothing
// guarantees the best individual survives.
std::vector<AgentSequence> select_survivors(const std::vector<AgentSequence>& population,
                                            std::span<const double> adjusted_fitness,
                                            int target_size, Rng& rng);

// One-point crossover: tails are exchanged at a cut interior to each parent
// (the boundary for length-1 parents). Offspring lengths sum to the parents'.
std::pair<AgentSequence, AgentSequence> crossover_at(const AgentSequence& a,
                                                     const AgentSequence& b, std::size_t cut_a,
                                                     std::size_t cut_b);
std::pair<AgentSequence, AgentSequence> crossover(const AgentSequence& a, const AgentSequence& b,
                                                  Rng& rng);

// One point mutation: insert / replace / delete with equal probability,
// delete suppressed on length-1 individuals so no sequence ever empties.
AgentSequence mutate(const AgentSequence& individual, std::span<const AgentPtr> pool, Rng& rng);

struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_length = 0.0;
};

struct EvolveResult {
    AgentSequence best;
    double best_fitness = 0.0;
    std::vector<GenerationRecord> trace;
    int generations = 0;
};

// Evolves agent-sequences against one flattened request. The population is
// seeded with short random sequences from the pool plus any stored past
// solutions; each generation evaluates, selects proportionally to the
// parsimony-adjusted fitness, then crosses over and mutates random tenths of
// the survivors. Returns the best individual ever seen by raw fitness.
EvolveResult evolve(std::span<const AttributeTuple> request, std::span<const AgentPtr> pool,
                    std::span<const AgentSequence> stored_solutions,
                    const EvolutionParams& params, Rng& rng);

}  // namespace ecosim
