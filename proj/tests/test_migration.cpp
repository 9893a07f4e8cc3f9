#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ecosim/migration.hpp"

using namespace ecosim;

namespace {

AgentPtr agent_with(std::uint64_t id, std::initializer_list<AttributeTuple> tuples,
                    double distance_threshold = 0.9) {
    auto a = std::make_shared<Agent>();
    a->id = id;
    a->description = SemanticDescription(std::vector<AttributeTuple>(tuples));
    a->recognizer = std::make_shared<DistanceRecognizer>(a->description, distance_threshold);
    return a;
}

HabitatNetwork small_net(int n = 4) {
    NetworkParams params;
    params.degree = 1;
    Rng rng(1);
    return HabitatNetwork::random(n, params, rng);
}

}  // namespace

TEST_CASE("execution earns migration budget") {
    auto a = agent_with(1, {{1, 1}, {2, 2}, {3, 3}});
    a->migration_counter = 0;
    on_execution(*a);
    CHECK(a->migration_counter == 1);
    on_execution(*a);
    CHECK(a->migration_counter == 2);
}

TEST_CASE("interaction exchanges histories only on mutual similarity") {
    auto resident = agent_with(1, {{1, 10}, {2, 20}, {3, 30}});
    resident->history = {{5, 3, 4, 2}, {6, 9, 1, 0}, {7, 12, 2, 1}};

    SUBCASE("identical descriptions exchange; unsuccessful stops are kept back") {
        auto arriver = agent_with(2, {{1, 10}, {2, 20}, {3, 30}});
        arriver->history = {{0, 1, 0, 0}};
        const auto candidates = interact(*arriver, *resident);
        REQUIRE(candidates.has_value());
        CHECK(*candidates == std::vector<int>{5, 7});  // habitat 6 never succeeded
    }

    SUBCASE("already-visited habitats are excluded") {
        auto arriver = agent_with(3, {{1, 10}, {2, 20}, {3, 30}});
        arriver->history = {{5, 2, 0, 0}};
        const auto candidates = interact(*arriver, *resident);
        REQUIRE(candidates.has_value());
        CHECK(*candidates == std::vector<int>{7});
    }

    SUBCASE("dissimilar pairs exchange nothing") {
        auto arriver = agent_with(4, {{7, 10}, {8, 20}, {9, 30}});
        CHECK_FALSE(interact(*arriver, *resident).has_value());
    }

    SUBCASE("empty successful history yields an empty candidate list") {
        auto blank = agent_with(5, {{1, 10}, {2, 20}, {3, 30}});
        blank->history = {{4, 1, 3, 0}};
        auto arriver = agent_with(6, {{1, 10}, {2, 20}, {3, 30}});
        const auto candidates = interact(*arriver, *blank);
        REQUIRE(candidates.has_value());
        CHECK(candidates->empty());
    }

    SUBCASE("missing recognizers are an error") {
        auto arriver = agent_with(7, {{1, 10}, {2, 20}, {3, 30}});
        auto bare = std::make_shared<Agent>();
        bare->description = SemanticDescription({{1, 10}, {2, 20}, {3, 30}});
        CHECK_THROWS_AS(interact(*arriver, *bare), std::logic_error);
    }
}

TEST_CASE("select_promising picks by success rate with recency tie-breaks") {
    std::vector<MigrationRecord> history{{1, 10, 10, 9}, {2, 20, 10, 3}, {3, 30, 10, 9}};

    SUBCASE("single candidate") {
        const std::vector<int> one{2};
        CHECK(select_promising(one, history) == 2);
    }

    SUBCASE("argmax of the success rate") {
        const std::vector<int> pair{1, 2};
        CHECK(select_promising(pair, history) == 1);
    }

    SUBCASE("equal rates break toward the most recent") {
        const std::vector<int> tied{1, 3};
        CHECK(select_promising(tied, history) == 3);
    }

    SUBCASE("equal rate and recency break toward the lowest id") {
        std::vector<MigrationRecord> flat{{4, 10, 5, 5}, {2, 10, 5, 5}};
        const std::vector<int> tied{4, 2};
        CHECK(select_promising(tied, flat) == 2);
    }

    CHECK_THROWS_AS(select_promising({}, history), std::invalid_argument);
}

TEST_CASE("targeted migration is a budgeted copy that ignores connectivity") {
    auto net = small_net(6);
    auto a = agent_with(1, {{1, 10}, {2, 20}, {3, 30}});
    a->migration_counter = 1;
    deploy_agent(net.habitat(0), a, 0);

    int unconnected = -1;
    for (int v = 1; v < net.size(); ++v) {
        if (!net.connected(0, v)) {
            unconnected = v;
            break;
        }
    }
    REQUIRE(unconnected > 0);

    std::uint64_t next_id = 100;
    const auto pool_before = net.habitat(unconnected).pool.size();
    auto copy = targeted_migrate(*a, net.habitat(unconnected), 0, 5, next_id);
    REQUIRE(copy != nullptr);
    CHECK(net.habitat(unconnected).pool.size() == pool_before + 1);
    CHECK(net.habitat(0).pool.size() == 1);  // source keeps the original
    CHECK(a->migration_counter == 0);
    CHECK(copy->migration_counter == 0);
    CHECK(copy->history.back().habitat == unconnected);
    CHECK(copy->history.back().arrival_step == 5);
    CHECK(copy->inbound_from == -1);
    CHECK(copy->recognizer == a->recognizer);  // inherited behaviour

    // Budget exhausted: the next attempt is refused, not an error.
    CHECK(targeted_migrate(*a, net.habitat(unconnected), 0, 6, next_id) == nullptr);
}

TEST_CASE("random control migrates uniformly over the other habitats") {
    NetworkParams params;
    params.degree = 4;
    Rng topo(2);
    auto net = HabitatNetwork::random(100, params, topo);
    auto a = agent_with(1, {{1, 10}, {2, 20}, {3, 30}});
    deploy_agent(net.habitat(7), a, 0);

    std::uint64_t next_id = 10;
    Rng rng(3);
    std::array<long, 100> counts{};
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        a->migration_counter = 1;
        auto copy = random_migrate_control(*a, net, 7, 1, next_id, rng);
        REQUIRE(copy != nullptr);
        counts[static_cast<std::size_t>(copy->history.back().habitat)] += 1;
    }
    CHECK(counts[7] == 0);
    const double expected = draws / 99.0;
    double chi2 = 0.0;
    for (int v = 0; v < 100; ++v) {
        if (v == 7) continue;
        chi2 += (counts[static_cast<std::size_t>(v)] - expected) *
                (counts[static_cast<std::size_t>(v)] - expected) / expected;
    }
    CHECK(chi2 < 148.2);  // chi-square 98 dof, p = 0.001

    a->migration_counter = 0;
    CHECK(random_migrate_control(*a, net, 7, 2, next_id, rng) == nullptr);
}

TEST_CASE("migration counters never go negative") {
    auto net = small_net();
    auto a = agent_with(1, {{1, 10}, {2, 20}, {3, 30}});
    deploy_agent(net.habitat(0), a, 0);
    std::uint64_t next_id = 50;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        if (rng.chance(0.3)) on_execution(*a);
        if (rng.chance(0.5)) {
            targeted_migrate(*a, net.habitat(1), 0, i, next_id);
        } else {
            random_migrate_control(*a, net, 0, i, next_id, rng);
        }
        CHECK(a->migration_counter >= 0);
    }
}

TEST_CASE("acquired niches are remembered, ranked and spent once") {
    auto sharer = agent_with(1, {{1, 10}, {2, 20}, {3, 30}});
    sharer->history = {{4, 10, 10, 9}, {5, 20, 10, 2}};
    auto receiver = agent_with(2, {{1, 10}, {2, 20}, {3, 30}});
    receiver->history = {{0, 1, 0, 0}};

    remember_candidates(*receiver, std::vector<int>{4, 5}, *sharer, 30);
    CHECK(receiver->acquired.size() == 2);

    auto best = take_most_promising(*receiver);
    REQUIRE(best.has_value());
    CHECK(best->habitat == 4);
    CHECK(best->sharer == sharer->description);

    auto second = take_most_promising(*receiver);
    REQUIRE(second.has_value());
    CHECK(second->habitat == 5);
    CHECK_FALSE(take_most_promising(*receiver).has_value());

    // Visited habitats are filtered out when spending.
    remember_candidates(*receiver, std::vector<int>{4}, *sharer, 31);
    receiver->history.push_back({4, 32, 0, 0});
    CHECK_FALSE(take_most_promising(*receiver).has_value());
}
