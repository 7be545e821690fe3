// Serial and OpenMP paths of the parallel kernels side by side, plus the
// per-slot cost of one DQN optimiser step.

#include <benchmark/benchmark.h>

#include <vector>

#include "slicing/auction_oracle.hpp"
#include "slicing/harness.hpp"
#include "slicing/mu_learner.hpp"
#include "slicing/rng.hpp"

using namespace slicing;

namespace {

void BM_OracleCheck(benchmark::State& state) {
    const Exec exec = state.range(0) == 0 ? Exec::serial : Exec::parallel;
    const std::int64_t instances = state.range(1);
    for (auto _ : state) {
        const auto report = oracle::run_oracle_check(instances, 7, {}, exec);
        benchmark::DoNotOptimize(report.welfare_mismatches);
    }
    state.SetItemsProcessed(state.iterations() * instances);
    state.SetLabel(exec == Exec::serial ? "serial" : "parallel");
}
BENCHMARK(BM_OracleCheck)->Args({0, 2000})->Args({1, 2000})->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    SweepSpec spec;
    spec.base.horizon = state.range(1);
    spec.base.window = static_cast<int>(spec.base.horizon);
    spec.axis = SweepAxis::lambda;
    spec.values = {6.0, 8.0, 10.0};
    spec.policies = {Policy::queue_aware, Policy::random};
    spec.seeds = 2;
    spec.exec = state.range(0) == 0 ? Exec::serial : Exec::parallel;
    for (auto _ : state) {
        const auto rows = sweep(spec);
        benchmark::DoNotOptimize(rows.data());
    }
    state.SetLabel(spec.exec == Exec::serial ? "serial" : "parallel");
}
BENCHMARK(BM_Sweep)->Args({0, 2000})->Args({1, 2000})->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
    const ActionSpace space{5, 10};
    const ActionMask open(static_cast<std::size_t>(space.size()), 1);
    Rng rng(3);
    QNet net(space, 16, {}, rng);
    std::vector<Experience> pool(static_cast<std::size_t>(state.range(0)));
    for (auto& e : pool) {
        for (auto& x : e.state) x = 2 * uniform01(rng) - 1;
        for (auto& x : e.next) x = 2 * uniform01(rng) - 1;
        e.action = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(space.size())));
        e.utility = 8 * uniform01(rng);
        e.state_mask = open;
        e.next_mask = open;
    }
    std::vector<const Experience*> batch;
    for (const auto& e : pool) batch.push_back(&e);
    for (auto _ : state) benchmark::DoNotOptimize(net.train_step(batch, 0.9));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
