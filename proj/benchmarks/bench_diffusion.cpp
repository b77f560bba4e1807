#include "hjs/diffusion.hpp"

#include <benchmark/benchmark.h>

namespace {

const hjs::CoefficientSpec kOu{hjs::LinearDrift{1.0, 0.0}, hjs::ConstantDiffusion{1.0},
                               hjs::ConstantJump{0.0}};

void BM_ExactOuStep(benchmark::State& state) {
    hjs::RandomStream noise(1, 1);
    const hjs::IntegratorConfig cfg{hjs::ExactOU{}, 0.01};
    double x = 0.0;
    for (auto _ : state) {
        x = hjs::advance_diffusion(x, 0.01, kOu, cfg, noise);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_ExactOuStep);

void BM_EulerMaruyamaUnitInterval(benchmark::State& state) {
    hjs::RandomStream noise(1, 1);
    const double h = 1.0 / static_cast<double>(state.range(0));
    const hjs::IntegratorConfig cfg{hjs::EulerMaruyama{h}, 0.01};
    double x = 0.0;
    for (auto _ : state) {
        x = hjs::advance_diffusion(x, 1.0, kOu, cfg, noise);
        benchmark::DoNotOptimize(x);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerMaruyamaUnitInterval)->Arg(100)->Arg(1000);

} // namespace
