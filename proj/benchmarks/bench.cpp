#include <benchmark/benchmark.h>

#include "ecosim/evolution.hpp"
#include "ecosim/recognizer.hpp"
#include "ecosim/simulation.hpp"
#include "ecosim/svm.hpp"

using namespace ecosim;

namespace {

SemanticDescription sample_description(Rng& rng) { return random_agent_description(rng, 8); }

void BM_Canonicalize(benchmark::State& state) {
    Rng rng(1);
    const auto desc = sample_description(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(canonicalize(desc));
    }
}
BENCHMARK(BM_Canonicalize);

void BM_Difference(benchmark::State& state) {
    Rng rng(2);
    const auto a = sample_description(rng);
    const auto b = sample_description(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(difference(a, b));
    }
}
BENCHMARK(BM_Difference);

void BM_SequenceFitness(benchmark::State& state) {
    Rng rng(3);
    std::vector<AgentPtr> members;
    for (int i = 0; i < 8; ++i) {
        members.push_back(std::make_shared<Agent>(
            Agent{.id = static_cast<std::uint64_t>(i), .description = sample_description(rng)}));
    }
    const AgentSequence sequence(members);
    const auto request = flatten(random_request(rng, 8));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sequence_fitness(sequence, request));
    }
}
BENCHMARK(BM_SequenceFitness);

void BM_MlpForward(benchmark::State& state) {
    Rng rng(4);
    const auto own = sample_description(rng);
    const auto width = own.size() * kBitsPerTuple;
    Mlp<float> net(static_cast<int>(width), rng);
    const auto input = encode_input(sample_description(rng), width);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(input));
    }
}
BENCHMARK(BM_MlpForward);

void BM_MlpDeploymentTraining(benchmark::State& state) {
    Rng rng(5);
    const auto own = sample_description(rng);
    for (auto _ : state) {
        state.PauseTiming();
        Rng seed(42);
        MlpRecognizer recognizer(own, MlpParams{}, TrainingSetParams{});
        state.ResumeTiming();
        recognizer.train_initial(seed);
        benchmark::DoNotOptimize(recognizer.trained());
    }
}
BENCHMARK(BM_MlpDeploymentTraining)->Unit(benchmark::kMillisecond);

void BM_SmoTraining(benchmark::State& state) {
    Rng rng(6);
    const auto own = sample_description(rng);
    for (auto _ : state) {
        state.PauseTiming();
        Rng seed(42);
        SvmRecognizer recognizer(own, SvmParams{}, TrainingSetParams{});
        state.ResumeTiming();
        recognizer.train_initial(seed);
        benchmark::DoNotOptimize(recognizer.trained());
    }
}
BENCHMARK(BM_SmoTraining)->Unit(benchmark::kMillisecond);

void BM_Evolve(benchmark::State& state) {
    Rng rng(7);
    std::vector<AgentPtr> pool;
    for (int i = 0; i < 60; ++i) {
        pool.push_back(std::make_shared<Agent>(
            Agent{.id = static_cast<std::uint64_t>(i), .description = sample_description(rng)}));
    }
    const auto request = flatten(random_request(rng, 8));
    EvolutionParams params;
    params.max_generations = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng evolve_rng(seed++);
        benchmark::DoNotOptimize(evolve(request, pool, {}, params, evolve_rng));
    }
}
BENCHMARK(BM_Evolve)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SimulationStep(benchmark::State& state) {
    SimConfig cfg;
    cfg.scenario = Scenario::baseline;
    cfg.steps = 1;
    Simulation sim(cfg, 0);
    for (auto _ : state) {
        sim.step();
    }
}
BENCHMARK(BM_SimulationStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
