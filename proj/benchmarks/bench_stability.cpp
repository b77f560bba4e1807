#include "hjs/stability.hpp"

#include "support/models.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_PerronFrobenius(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    hjs::testing::ModelGenerator gen(1);
    hjs::Matrix h(n, n);
    for (double& v : h.values()) {
        v = gen.uniform(0.0, 1.0);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hjs::perron_frobenius(h).rho);
    }
}
BENCHMARK(BM_PerronFrobenius)->Arg(2)->Arg(8)->Arg(32);

void BM_DriftScan(benchmark::State& state) {
    const auto model = hjs::testing::reference_model();
    const auto stab = hjs::compute_stability(model);
    hjs::DriftScanOptions opts;
    opts.n_points = 10'000;
    opts.threads = 1;
    for (auto _ : state) {
        const auto r = hjs::drift_scan(model, hjs::LyapunovSpec::exponential(), stab, {}, opts);
        benchmark::DoNotOptimize(r.d2);
    }
}
BENCHMARK(BM_DriftScan);

} // namespace
