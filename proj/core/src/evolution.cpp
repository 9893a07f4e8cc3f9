#include "ecosim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ecosim {

AgentSequence::AgentSequence(std::vector<AgentPtr> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw std::invalid_argument("agent sequence must not be empty");
    }
    rebuild_attributes();
}

void AgentSequence::rebuild_attributes() {
    attributes_.clear();
    for (const auto& agent : members_) {
        const auto& tuples = agent->description.tuples();
        attributes_.insert(attributes_.end(), tuples.begin(), tuples.end());
    }
}

void AgentSequence::insert(std::size_t position, AgentPtr agent) {
    members_.insert(members_.begin() + static_cast<std::ptrdiff_t>(position), std::move(agent));
    rebuild_attributes();
}

void AgentSequence::replace(std::size_t position, AgentPtr agent) {
    members_[position] = std::move(agent);
    rebuild_attributes();
}

void AgentSequence::erase(std::size_t position) {
    if (members_.size() <= 1) {
        throw std::logic_error("cannot erase the last member of a sequence");
    }
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(position));
    rebuild_attributes();
}

double sequence_fitness(const AgentSequence& sequence, std::span<const AttributeTuple> request,
                        double id_mismatch_penalty) {
    if (sequence.empty()) throw std::invalid_argument("cannot evaluate an empty sequence");
    if (request.empty()) throw std::invalid_argument("cannot evaluate an empty request");
    const auto& attributes = sequence.attributes();
    double total = 0.0;
    for (const auto& r : request) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : attributes) {
            const double d = id_mismatch_penalty * std::abs(r.id - a.id) +
                             std::abs(r.value - a.value);
            if (d < best) best = d;
            if (best == 0.0) break;
        }
        total += best;
    }
    return 1.0 / (1.0 + total);
}

double parsimony_adjust(double fitness, std::size_t length, double average_length) {
    if (length == 0 || average_length <= 0.0) {
        throw std::invalid_argument("parsimony needs positive lengths");
    }
    return fitness * std::min(1.0, average_length / static_cast<double>(length));
}

int population_size(double average_length, const EvolutionParams& params) {
    return static_cast<int>(
        std::lround(params.base_size + params.size_coeff * average_length));
}

std::vector<AgentSequence> select_survivors(const std::vector<AgentSequence>& population,
                                            std::span<const double> adjusted_fitness,
                                            int target_size, Rng& rng) {
    if (population.empty()) throw std::invalid_argument("cannot select from an empty population");
    double total = 0.0;
    for (double f : adjusted_fitness) total += f;

    std::vector<AgentSequence> survivors;
    survivors.reserve(static_cast<std::size_t>(target_size));
    if (total <= 0.0) {
        for (int i = 0; i < target_size; ++i) {
            survivors.push_back(population[rng.index(population.size())]);
        }
        return survivors;
    }
    // Roulette wheel over the cumulative weights.
    std::vector<double> cumulative(adjusted_fitness.size());
    double run = 0.0;
    for (std::size_t i = 0; i < adjusted_fitness.size(); ++i) {
        run += adjusted_fitness[i];
        cumulative[i] = run;
    }
    for (int i = 0; i < target_size; ++i) {
        const double spin = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), spin);
        const auto idx = std::min(static_cast<std::size_t>(it - cumulative.begin()),
                                  population.size() - 1);
        survivors.push_back(population[idx]);
    }
    return survivors;
}

std::pair<AgentSequence, AgentSequence> crossover_at(const AgentSequence& a,
                                                     const AgentSequence& b, std::size_t cut_a,
                                                     std::size_t cut_b) {
    const auto& ma = a.members();
    const auto& mb = b.members();
    std::vector<AgentPtr> first(ma.begin(), ma.begin() + static_cast<std::ptrdiff_t>(cut_a));
    first.insert(first.end(), mb.begin() + static_cast<std::ptrdiff_t>(cut_b), mb.end());
    std::vector<AgentPtr> second(mb.begin(), mb.begin() + static_cast<std::ptrdiff_t>(cut_b));
    second.insert(second.end(), ma.begin() + static_cast<std::ptrdiff_t>(cut_a), ma.end());
    return {AgentSequence(std::move(first)), AgentSequence(std::move(second))};
}

namespace {

std::size_t pick_cut(std::size_t length, Rng& rng) {
    if (length <= 1) return 1;
    return static_cast<std::size_t>(rng.range(1, static_cast<int>(length) - 1));
}

}  // namespace

std::pair<AgentSequence, AgentSequence> crossover(const AgentSequence& a, const AgentSequence& b,
                                                  Rng& rng) {
    return crossover_at(a, b, pick_cut(a.length(), rng), pick_cut(b.length(), rng));
}

AgentSequence mutate(const AgentSequence& individual, std::span<const AgentPtr> pool, Rng& rng) {
    if (pool.empty()) throw std::invalid_argument("mutation needs a non-empty agent pool");
    AgentSequence mutated = individual;
    const std::size_t length = mutated.length();
    // insert / replace / delete; deletions are suppressed at length 1.
    const int kind = length <= 1 ? rng.range(0, 1) : rng.range(0, 2);
    switch (kind) {
        case 0:
            mutated.insert(rng.index(length + 1), pool[rng.index(pool.size())]);
            break;
        case 1:
            mutated.replace(rng.index(length), pool[rng.index(pool.size())]);
            break;
        default:
            mutated.erase(rng.index(length));
            break;
    }
    return mutated;
}

namespace {

AgentSequence random_seed_sequence(std::span<const AgentPtr> pool, int max_length, Rng& rng) {
    const int length = rng.range(1, max_length);
    std::vector<AgentPtr> members;
    members.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) members.push_back(pool[rng.index(pool.size())]);
    return AgentSequence(std::move(members));
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t wanted, Rng& rng) {
    std::vector<std::size_t> order(population);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    order.resize(std::min(wanted, population));
    return order;
}

}  // namespace

namespace {

// Fitness rides along with each individual so that selection copies are not
// re-evaluated; only crossover and mutation products pay for an evaluation.
struct Scored {
    AgentSequence sequence;
    double raw = -1.0;  // negative = not evaluated yet
};

}  // namespace

EvolveResult evolve(std::span<const AttributeTuple> request, std::span<const AgentPtr> pool,
                    std::span<const AgentSequence> stored_solutions,
                    const EvolutionParams& params, Rng& rng) {
    if (pool.empty()) {
        throw std::invalid_argument("cannot seed a population from an empty agent pool");
    }
    if (request.empty()) throw std::invalid_argument("cannot evolve against an empty request");

    std::vector<Scored> population;
    for (const auto& stored : stored_solutions) population.push_back({stored, -1.0});
    const int initial_target = population_size(2.0, params);
    while (population.size() < static_cast<std::size_t>(initial_target)) {
        population.push_back({random_seed_sequence(pool, params.seed_length_max, rng), -1.0});
    }

    EvolveResult result;
    std::vector<double> adjusted;
    for (int generation = 0; generation < params.max_generations; ++generation) {
        double length_sum = 0.0;
        double generation_best = 0.0;
        for (auto& individual : population) {
            if (individual.raw < 0.0) {
                individual.raw = sequence_fitness(individual.sequence, request,
                                                  params.id_mismatch_penalty);
            }
            length_sum += static_cast<double>(individual.sequence.length());
            generation_best = std::max(generation_best, individual.raw);
            if (individual.raw > result.best_fitness) {
                result.best_fitness = individual.raw;
                result.best = individual.sequence;
            }
        }
        const double mean_length = length_sum / static_cast<double>(population.size());
        result.trace.push_back({generation, generation_best, mean_length});
        result.generations = generation + 1;
        if (result.best_fitness >= 1.0) break;

        adjusted.resize(population.size());
        for (std::size_t i = 0; i < population.size(); ++i) {
            adjusted[i] = parsimony_adjust(population[i].raw, population[i].sequence.length(),
                                           mean_length);
        }
        const int target = population_size(mean_length, params);

        // Fitness-proportional, non-elitist survival with replacement.
        double total = 0.0;
        for (double f : adjusted) total += f;
        std::vector<Scored> survivors;
        survivors.reserve(static_cast<std::size_t>(target));
        if (total <= 0.0) {
            for (int i = 0; i < target; ++i) {
                survivors.push_back(population[rng.index(population.size())]);
            }
        } else {
            std::vector<double> cumulative(adjusted.size());
            double run = 0.0;
            for (std::size_t i = 0; i < adjusted.size(); ++i) {
                run += adjusted[i];
                cumulative[i] = run;
            }
            for (int i = 0; i < target; ++i) {
                const double spin = rng.uniform() * total;
                const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), spin);
                const auto idx = std::min(static_cast<std::size_t>(it - cumulative.begin()),
                                          population.size() - 1);
                survivors.push_back(population[idx]);
            }
        }
        population = std::move(survivors);

        const auto n = population.size();
        const auto cross_count =
            static_cast<std::size_t>(std::lround(params.crossover_fraction *
                                                 static_cast<double>(n)));
        auto cross = sample_indices(n, cross_count & ~std::size_t{1}, rng);
        for (std::size_t k = 0; k + 1 < cross.size(); k += 2) {
            auto offspring =
                crossover(population[cross[k]].sequence, population[cross[k + 1]].sequence, rng);
            population[cross[k]] = {std::move(offspring.first), -1.0};
            population[cross[k + 1]] = {std::move(offspring.second), -1.0};
        }

        const auto mutation_count =
            static_cast<std::size_t>(std::lround(params.mutation_fraction *
                                                 static_cast<double>(n)));
        for (std::size_t idx : sample_indices(n, mutation_count, rng)) {
            population[idx] = {mutate(population[idx].sequence, pool, rng), -1.0};
        }
    }
    return result;
}

}  // namespace ecosim
