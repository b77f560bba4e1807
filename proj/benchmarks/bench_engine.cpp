#include "hjs/engine.hpp"

#include "support/models.hpp"

#include <benchmark/benchmark.h>

namespace {

const hjs::IntegratorConfig kExact{hjs::ExactOU{}, 0.01};

void BM_SimulatePathEventsOnly(benchmark::State& state) {
    const auto model = hjs::testing::two_component_model();
    hjs::SimulationOptions o;
    o.record_skeleton = false;
    const double horizon = static_cast<double>(state.range(0));
    std::uint64_t seed = 0;
    std::size_t events = 0;
    for (auto _ : state) {
        const auto p = hjs::simulate_path(model, horizon, kExact, ++seed, o);
        events += p.events.size();
        benchmark::DoNotOptimize(p.final_state.x);
    }
    state.counters["events/s"] =
        benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulatePathEventsOnly)->Arg(100)->Arg(1000);

void BM_SimulatePathWithSkeleton(benchmark::State& state) {
    const auto model = hjs::testing::reference_model();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const auto p = hjs::simulate_path(model, 100.0, kExact, ++seed);
        benchmark::DoNotOptimize(p.skeleton.size());
    }
}
BENCHMARK(BM_SimulatePathWithSkeleton);

void BM_SimulatePathReference(benchmark::State& state) {
    const auto model = hjs::testing::two_component_model();
    hjs::SimulationOptions o;
    o.record_skeleton = false;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const auto p = hjs::simulate_path_reference(model, 5.0, kExact, ++seed, o);
        benchmark::DoNotOptimize(p.events.size());
    }
}
BENCHMARK(BM_SimulatePathReference);

void BM_SimulateStateShortStep(benchmark::State& state) {
    const auto model = hjs::testing::reference_model();
    const hjs::State z{0.5, hjs::Matrix{{0.7}}};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hjs::simulate_state(model, z, 1e-3, kExact, ++seed).x);
    }
}
BENCHMARK(BM_SimulateStateShortStep);

} // namespace

BENCHMARK_MAIN();
