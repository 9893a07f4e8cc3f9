#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ecosim/evolution.hpp"
#include "oracles.hpp"

using namespace ecosim;

namespace {

AgentPtr agent(std::uint64_t id, std::initializer_list<AttributeTuple> tuples) {
    auto a = std::make_shared<Agent>();
    a->id = id;
    a->description = SemanticDescription(std::vector<AttributeTuple>(tuples));
    return a;
}

std::vector<AttributeTuple> request(std::initializer_list<AttributeTuple> tuples) {
    return std::vector<AttributeTuple>(tuples);
}

}  // namespace

TEST_CASE("fitness worked examples") {
    // Perfect cover.
    const AgentSequence exact({agent(1, {{1, 23}, {2, 45}, {3, 33}})});
    CHECK(sequence_fitness(exact, request({{1, 23}, {2, 45}, {3, 33}})) == doctest::Approx(1.0));

    // Single tuple two units away.
    const AgentSequence close({agent(2, {{1, 25}, {2, 2}, {3, 3}})});
    CHECK(sequence_fitness(close, request({{1, 23}})) == doctest::Approx(1.0 / 3.0));

    // Six-attribute service against the first part of a two-part request.
    const AgentSequence service(
        {agent(3, {{1, 25}, {2, 35}, {3, 55}, {4, 6}, {5, 37}, {6, 12}})});
    const auto part = request({{1, 23}, {2, 45}, {3, 33}, {4, 6}, {5, 8}, {6, 16}});
    CHECK(sequence_fitness(service, part) == doctest::Approx(1.0 / 68.0));
}

TEST_CASE("fitness equals the independent evaluator on random pairs") {
    Rng rng(47);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<AgentPtr> members;
        const int n = rng.range(1, 4);
        for (int i = 0; i < n; ++i) {
            members.push_back(
                std::make_shared<Agent>(Agent{.id = static_cast<std::uint64_t>(i),
                                              .description = random_agent_description(rng)}));
        }
        const AgentSequence sequence(members);
        const auto req = flatten(random_request(rng));
        const double lhs = sequence_fitness(sequence, req);
        const double rhs = oracles::reference_fitness(sequence, req);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(lhs > 0.0);
        CHECK(lhs <= 1.0);
    }
}

TEST_CASE("fitness rejects empty inputs") {
    const AgentSequence one({agent(1, {{1, 1}, {2, 2}, {3, 3}})});
    CHECK_THROWS_AS(sequence_fitness(one, {}), std::invalid_argument);
    CHECK_THROWS_AS(AgentSequence(std::vector<AgentPtr>{}), std::invalid_argument);
}

TEST_CASE("parsimony adjustment") {
    CHECK(parsimony_adjust(0.8, 4, 4.0) == doctest::Approx(0.8));
    CHECK(parsimony_adjust(0.8, 8, 4.0) == doctest::Approx(0.4));
    CHECK(parsimony_adjust(0.8, 2, 4.0) == doctest::Approx(0.8));  // no bonus
    CHECK_THROWS_AS(parsimony_adjust(0.8, 0, 4.0), std::invalid_argument);
}

TEST_CASE("parsimony keeps the order of equal-length individuals") {
    Rng rng(49);
    for (int trial = 0; trial < 100; ++trial) {
        const double f1 = rng.uniform();
        const double f2 = rng.uniform();
        const std::size_t len = static_cast<std::size_t>(rng.range(1, 9));
        const double avg = rng.uniform() * 8.0 + 0.5;
        CHECK((f1 < f2) == (parsimony_adjust(f1, len, avg) < parsimony_adjust(f2, len, avg)));
    }
}

TEST_CASE("population size rule") {
    EvolutionParams params;
    CHECK(population_size(1.0, params) == 30);
    CHECK(population_size(3.0, params) == 50);
    double previous = 0;
    for (double len = 1.0; len < 12.0; len += 0.5) {
        const double size = population_size(len, params);
        CHECK(size >= previous);
        previous = size;
    }
}

TEST_CASE("selection follows the adjusted fitness distribution") {
    Rng rng(53);
    std::vector<AgentSequence> population;
    for (int i = 0; i < 4; ++i) {
        population.push_back(AgentSequence({agent(static_cast<std::uint64_t>(i),
                                                  {{1, i * 10 + 1}, {2, 2}, {3, 3}})}));
    }

    SUBCASE("one dominant individual wins its share") {
        const std::vector<double> fitness{1.0, 1e-9, 1e-9, 1e-9};
        int dominant = 0;
        for (int draw = 0; draw < 10000; ++draw) {
            const auto survivors = select_survivors(population, fitness, 1, rng);
            if (survivors.front().members().front()->id == 0) ++dominant;
        }
        CHECK(dominant > 9900);
    }

    SUBCASE("uniform fitness selects uniformly (chi-square)") {
        const std::vector<double> fitness{0.25, 0.25, 0.25, 0.25};
        std::array<long, 4> counts{};
        const int draws = 10000;
        for (int draw = 0; draw < draws; ++draw) {
            const auto survivors = select_survivors(population, fitness, 1, rng);
            counts[survivors.front().members().front()->id] += 1;
        }
        const double expected = draws / 4.0;
        double chi2 = 0.0;
        for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;
        CHECK(chi2 < 16.27);  // chi-square 3 dof, p = 0.001
    }

    SUBCASE("all-zero fitness falls back to uniform sampling") {
        const std::vector<double> fitness{0.0, 0.0, 0.0, 0.0};
        const auto survivors = select_survivors(population, fitness, 8, rng);
        CHECK(survivors.size() == 8);
    }

    SUBCASE("population of one is always selected") {
        const std::vector<AgentSequence> single{population.front()};
        const std::vector<double> fitness{0.4};
        const auto survivors = select_survivors(single, fitness, 3, rng);
        CHECK(survivors.size() == 3);
    }
}

TEST_CASE("crossover mechanics") {
    const auto a = agent(1, {{1, 1}, {2, 2}, {3, 3}});
    const auto b = agent(2, {{1, 4}, {2, 5}, {3, 6}});
    const auto c = agent(3, {{1, 7}, {2, 8}, {3, 9}});
    const auto d = agent(4, {{1, 10}, {2, 11}, {3, 12}});
    const auto e = agent(5, {{1, 13}, {2, 14}, {3, 15}});

    const AgentSequence left({a, b, c});
    const AgentSequence right({d, e});

    const auto [first, second] = crossover_at(left, right, 1, 1);
    REQUIRE(first.length() == 2);
    CHECK(first.members()[0]->id == 1);
    CHECK(first.members()[1]->id == 5);
    REQUIRE(second.length() == 3);
    CHECK(second.members()[0]->id == 4);
    CHECK(second.members()[1]->id == 2);
    CHECK(second.members()[2]->id == 3);

    Rng rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const auto [o1, o2] = crossover(left, right, rng);
        CHECK(o1.length() + o2.length() == left.length() + right.length());
        CHECK(o1.length() >= 1);
        CHECK(o2.length() >= 1);
    }

    const auto [s1, s2] = crossover(AgentSequence({a}), AgentSequence({a}), rng);
    CHECK(s1.length() == 1);
    CHECK(s2.length() == 1);
    CHECK(s1.members()[0]->id == 1);
}

TEST_CASE("mutation keeps sequences non-empty and changes length by at most one") {
    Rng rng(61);
    std::vector<AgentPtr> pool{agent(1, {{1, 1}, {2, 2}, {3, 3}}),
                               agent(2, {{1, 4}, {2, 5}, {3, 6}})};
    const AgentSequence single({pool[0]});
    for (int trial = 0; trial < 200; ++trial) {
        const auto mutated = mutate(single, pool, rng);
        CHECK(mutated.length() >= 1);
        CHECK(mutated.length() <= 2);
    }
    const AgentSequence triple({pool[0], pool[1], pool[0]});
    for (int trial = 0; trial < 200; ++trial) {
        const auto mutated = mutate(triple, pool, rng);
        CHECK(mutated.length() >= 2);
        CHECK(mutated.length() <= 4);
    }
    CHECK_THROWS_AS(mutate(single, {}, rng), std::invalid_argument);
}

TEST_CASE("evolve solves a trivially coverable request") {
    Rng rng(67);
    std::vector<AgentPtr> pool{agent(1, {{1, 42}, {2, 2}, {3, 3}}),
                               agent(2, {{4, 4}, {5, 5}, {6, 6}})};
    EvolutionParams params;
    const auto result = evolve(request({{1, 42}}), pool, {}, params, rng);
    CHECK(result.best_fitness == doctest::Approx(1.0));
    CHECK(result.generations <= params.max_generations);
}

TEST_CASE("evolve trace is non-decreasing in best-ever fitness and deterministic") {
    std::vector<AgentPtr> pool;
    Rng world(71);
    for (int i = 0; i < 6; ++i) {
        pool.push_back(std::make_shared<Agent>(
            Agent{.id = static_cast<std::uint64_t>(i),
                  .description = random_agent_description(world)}));
    }
    const auto req = flatten(random_request(world));
    EvolutionParams params;
    params.max_generations = 40;

    Rng rng_a(123);
    const auto first = evolve(req, pool, {}, params, rng_a);
    double best = 0.0;
    for (const auto& record : first.trace) {
        CHECK(record.best_fitness >= 0.0);
        best = std::max(best, record.best_fitness);
    }
    CHECK(first.best_fitness == doctest::Approx(best));

    Rng rng_b(123);
    const auto second = evolve(req, pool, {}, params, rng_b);
    REQUIRE(second.trace.size() == first.trace.size());
    for (std::size_t g = 0; g < first.trace.size(); ++g) {
        CHECK(first.trace[g].best_fitness == second.trace[g].best_fitness);
        CHECK(first.trace[g].mean_length == second.trace[g].mean_length);
    }
    CHECK_THROWS_AS(evolve(req, {}, {}, params, rng_b), std::invalid_argument);
}

TEST_CASE("evolve matches exhaustive search on tiny instances") {
    Rng world(73);
    int matched = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<AgentPtr> pool;
        const int n = world.range(1, 4);
        for (int i = 0; i < n; ++i) {
            pool.push_back(std::make_shared<Agent>(
                Agent{.id = static_cast<std::uint64_t>(i),
                      .description = random_agent_description(world)}));
        }
        std::vector<AttributeTuple> req;
        const int m = world.range(1, 3);
        for (int i = 0; i < m; ++i) {
            req.push_back({world.range(1, 100), world.range(1, 100)});
        }
        const double oracle = oracles::exhaustive_best_fitness(pool, req, 4);
        Rng rng(9000 + static_cast<std::uint64_t>(trial));
        const auto result = evolve(req, pool, {}, EvolutionParams{}, rng);
        if (std::abs(result.best_fitness - oracle) <= 1e-12) ++matched;
    }
    CHECK(matched >= trials * 95 / 100);
}
