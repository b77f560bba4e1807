#include "hjs/diagnostics.hpp"
#include "hjs/engine.hpp"
#include "hjs/stats.hpp"

#include "support/models.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace hjs;
using hjs::testing::pure_ou_model;

namespace {

const IntegratorConfig kExact{ExactOU{}, 0.01};

// x(t) = t on [0, 10] sampled every 0.5, with a constant row sum.
Path ramp_path() {
    Path p;
    p.horizon = 10.0;
    p.skeleton = Skeleton(1);
    const std::vector<double> rs{0.25};
    for (int k = 0; k <= 20; ++k) {
        const double t = 0.5 * k;
        p.skeleton.push(t, t, rs, SampleKind::Grid);
    }
    return p;
}

double normal_cdf(double x, double sd) {
    return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)));
}

} // namespace

TEST(TestFunctions, Names) {
    const auto model = hjs::testing::reference_model();
    const std::vector<double> rs{0.5};
    EXPECT_EQ(make_test_function("one", model)(3.0, rs), 1.0);
    EXPECT_EQ(make_test_function("x", model)(3.0, rs), 3.0);
    EXPECT_EQ(make_test_function("x2", model)(3.0, rs), 9.0);
    EXPECT_EQ(make_test_function("rate", model)(3.0, rs), 1.5);
    EXPECT_THROW(make_test_function("cube", model), std::invalid_argument);
}

TEST(TimeAverage, ConstantIsExact) {
    const auto model = hjs::testing::reference_model();
    const auto path = simulate_path(model, 200.0, kExact, 4);
    const auto est = time_average(path, make_test_function("one", model), 20.0);
    EXPECT_EQ(est.value, 1.0);
    EXPECT_EQ(est.standard_error, 0.0);
    EXPECT_EQ(est.batch_count, 20u);
    EXPECT_EQ(est.burn_in, 20.0);
}

TEST(TimeAverage, TrapezoidIsExactForLinearSkeleton) {
    const auto path = ramp_path();
    const TestFunction x = [](double v, std::span<const double>) { return v; };
    EXPECT_NEAR(time_average(path, x, 0.0).value, 5.0, 1e-12);
    EXPECT_NEAR(time_average(path, x, 4.0).value, 7.0, 1e-12);
}

TEST(TimeAverage, RejectsBadArguments) {
    const auto path = ramp_path();
    const TestFunction x = [](double v, std::span<const double>) { return v; };
    EXPECT_THROW(time_average(path, x, 0.0, 19), std::invalid_argument);
    EXPECT_THROW(time_average(path, x, 10.0), std::invalid_argument);
    EXPECT_THROW(time_average(path, x, -1.0), std::invalid_argument);
}

TEST(TimeAverage, OrnsteinUhlenbeckMoments) {
    const auto model = pure_ou_model(1.0, 1.0);
    const auto path = simulate_path(model, 5000.0, kExact, 9);
    const auto mean = time_average(path, make_test_function("x", model), 100.0);
    const auto second = time_average(path, make_test_function("x2", model), 100.0);
    EXPECT_NEAR(mean.value, 0.0, 4.0 * mean.standard_error);
    EXPECT_NEAR(second.value, 0.5, 4.0 * second.standard_error);
    EXPECT_GT(mean.standard_error, 0.0);
    EXPECT_LT(mean.standard_error, 0.05);
}

TEST(PooledSamples, SkipsBurnInAndNonGridSamples) {
    const auto paths = simulate_ensemble(hjs::testing::reference_model(), 10.0, kExact, 2, 3);
    const auto xs = pooled_x_samples(paths, 5.0);
    std::size_t expected = 0;
    for (const auto& p : paths) {
        for (std::size_t k = 0; k < p.skeleton.size(); ++k) {
            expected += p.skeleton.kind(k) == SampleKind::Grid && p.skeleton.time(k) >= 5.0 ? 1 : 0;
        }
    }
    EXPECT_EQ(xs.size(), expected);
}

TEST(InvariantHistogram, MassesAndCompact) {
    std::vector<double> s;
    for (int k = 0; k < 1000; ++k) {
        s.push_back(-2.0 + 4.0 * (k + 0.5) / 1000.0);
    }
    const auto h = invariant_histogram(s, 8, Interval{-1.0, 1.0});
    ASSERT_EQ(h.bin_edges.size(), 9u);
    double total = 0.0;
    for (double m : h.bin_masses) {
        EXPECT_NEAR(m, 0.125, 1e-3);
        total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(h.min_mass_on_compact, 0.125, 1e-3);
    EXPECT_EQ(h.sample_count, 1000u);

    const auto clipped = invariant_histogram(s, 4, Interval{-1.0, 1.0}, Interval{-1.0, 1.0});
    EXPECT_EQ(clipped.outside, 500u);
    EXPECT_THROW(invariant_histogram(s, 0, Interval{-1.0, 1.0}), std::invalid_argument);
}

TEST(InvariantHistogram, OrnsteinUhlenbeckMatchesStationaryLaw) {
    // Independent draws from the engine: x_T from x_0 = 0 with T = 20 is
    // Normal(0, (1 - e^{-40}) / 2), the stationary law to double precision.
    const auto model = pure_ou_model(1.0, 1.0);
    const double sd = std::sqrt(0.5);
    std::vector<double> s(1'000'000);
    for (std::size_t k = 0; k < s.size(); ++k) {
        s[k] = simulate_state(model, model.initial, 20.0, kExact, mix_seed(31, k)).x;
    }
    const auto h = invariant_histogram(s, 50, Interval{-1.0, 1.0}, Interval{-3.0, 3.0});
    std::vector<double> observed;
    std::vector<double> expected;
    const double total = static_cast<double>(h.sample_count);
    const double counted = total - static_cast<double>(h.outside);
    for (std::size_t b = 0; b < h.bin_masses.size(); ++b) {
        observed.push_back(h.bin_masses[b] * counted);
        expected.push_back(total * (normal_cdf(h.bin_edges[b + 1], sd) - normal_cdf(h.bin_edges[b], sd)));
    }
    EXPECT_GT(stats::chi_squared_gof(observed, expected).p_value, 0.01);
    EXPECT_GT(h.min_mass_on_compact, 0.0);
}

TEST(InvariantHistogram, SymmetricModelGivesSymmetricMasses) {
    const auto model = pure_ou_model(1.0, 1.0);
    const auto paths = simulate_ensemble(model, 20.0, IntegratorConfig{ExactOU{}, 1.0}, 32, 5000);
    const auto xs = pooled_x_samples(paths, 5.0);
    const auto h = invariant_histogram(xs, 20, Interval{-1.0, 1.0}, Interval{-2.0, 2.0});
    const double n = static_cast<double>(xs.size());
    // Samples one time unit apart have correlation e^{-1}; inflate the
    // binomial variance by (1 + r) / (1 - r).
    const double inflation = (1.0 + std::exp(-1.0)) / (1.0 - std::exp(-1.0));
    for (std::size_t b = 0; b < 10; ++b) {
        const double lo = h.bin_masses[b];
        const double hi = h.bin_masses[19 - b];
        const double se = std::sqrt(inflation * (lo + hi) / n);
        EXPECT_NEAR(lo, hi, 4.0 * se) << "bin " << b;
    }
}

TEST(HistogramTv, IdenticalAndDisjointClouds) {
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> b;
    for (int k = 0; k < 500; ++k) {
        a.push_back({static_cast<double>(k % 10), 1.0});
        b.push_back({static_cast<double>(k % 10) + 100.0, 1.0});
    }
    EXPECT_NEAR(histogram_tv(a, a, 10).tv, 0.0, 1e-15);
    EXPECT_NEAR(histogram_tv(a, b, 10).tv, 1.0, 1e-15);
    std::vector<std::vector<double>> flat(100, {1.0, 2.0});
    EXPECT_THROW(histogram_tv(flat, flat, 10), std::invalid_argument);
}

TEST(HistogramTv, NullMomentsMatchRepeatedSameLawDraws) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n;
    std::vector<double> tvs;
    std::vector<double> floors;
    for (int rep = 0; rep < 400; ++rep) {
        std::vector<std::vector<double>> a(2000);
        std::vector<std::vector<double>> b(2000);
        for (auto& r : a) {
            r = {n(rng), n(rng)};
        }
        for (auto& r : b) {
            r = {n(rng), n(rng)};
        }
        const auto est = histogram_tv(a, b, 20);
        tvs.push_back(est.tv);
        floors.push_back(est.noise_floor);
    }
    // Sparse joint cells: most hold a handful of points.
    const double se = std::sqrt(stats::variance(tvs) / static_cast<double>(tvs.size()));
    EXPECT_NEAR(stats::mean(tvs), stats::mean(floors), 3.0 * se);
}

TEST(HistogramTv, NullSpreadMatchesRandomSplitsOfOnePool) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    std::vector<std::vector<double>> pool(4000);
    for (auto& r : pool) {
        r = {n(rng), n(rng)};
    }
    std::vector<double> tvs;
    TvEstimate est;
    for (int rep = 0; rep < 400; ++rep) {
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::vector<std::vector<double>> a(pool.begin(), pool.begin() + 2000);
        const std::vector<std::vector<double>> b(pool.begin() + 2000, pool.end());
        est = histogram_tv(a, b, 20);
        tvs.push_back(est.tv);
    }
    const double sd = std::sqrt(stats::variance(tvs));
    EXPECT_NEAR(stats::mean(tvs), est.noise_floor, 3.0 * sd / std::sqrt(400.0));
    EXPECT_NEAR(sd, est.noise_sd, 0.15 * est.noise_sd);
}

TEST(HistogramTv, IdenticalStartsStayAtTheFloor) {
    const auto model = pure_ou_model();
    MixingOptions o;
    o.integrator = kExact;
    const std::vector<double> times{0.5, 1.0, 2.0};
    const State z{1.0, Matrix{{0.0}}};
    const auto curve = mixing_curve(model, z, z, times, o);
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_LT(curve.tv_estimates[k], curve.noise_floor[k] + 4.0 * curve.noise_sd[k]);
    }
    EXPECT_EQ(curve.fit_points, 0u);
}

TEST(MixingCurve, DistinctStartsAreDisjointAtTimeZero) {
    const auto model = hjs::testing::reference_model();
    MixingOptions o;
    o.integrator = kExact;
    const std::vector<double> times{0.0, 0.5};
    const auto curve = mixing_curve(model, State{-1.0, Matrix{{0.0}}}, State{1.0, Matrix{{0.5}}}, times, o);
    EXPECT_EQ(curve.tv_estimates[0], 1.0);
    EXPECT_LT(curve.tv_estimates[1], 1.0);
}

TEST(MixingCurve, RequiresEnoughPaths) {
    MixingOptions o;
    o.n_paths = 999;
    o.integrator = kExact;
    const std::vector<double> times{1.0};
    const auto model = pure_ou_model();
    EXPECT_THROW(mixing_curve(model, model.initial, model.initial, times, o), std::invalid_argument);
}

TEST(MixingCurve, OrnsteinUhlenbeckForgetsItsStart) {
    const auto model = pure_ou_model();
    MixingOptions o;
    o.integrator = kExact;
    o.bins = 20;
    const std::vector<double> times{0.25, 0.5, 1.0, 1.5};
    const State a{-3.0, Matrix{{0.0}}};
    const State b{3.0, Matrix{{0.0}}};
    const auto curve = mixing_curve(model, a, b, times, o);
    ASSERT_EQ(curve.tv_estimates.size(), 4u);
    for (std::size_t k = 1; k < 4; ++k) {
        EXPECT_LT(curve.tv_estimates[k], curve.tv_estimates[k - 1]);
    }
    EXPECT_GT(curve.tv_estimates[0], 0.9);
    EXPECT_GT(curve.fitted_rate, 0.0);
    EXPECT_LT(curve.kendall_tau, 0.0);
}

TEST(AutocorrDecay, Ar1RecoversRate) {
    const double spacing = 0.1;
    const double phi = std::exp(-spacing);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    std::vector<double> s(400'000);
    double x = n(rng);
    for (double& v : s) {
        v = x;
        x = phi * x + std::sqrt(1.0 - phi * phi) * n(rng);
    }
    const std::vector<double> lags{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    const auto fit = autocorr_decay(s, spacing, lags);
    EXPECT_NEAR(fit.rate, 1.0, 0.05);
    EXPECT_GT(fit.r2, 0.99);
    EXPECT_EQ(fit.fit_points, 6u);
    EXPECT_NEAR(fit.autocorrelation[0], phi, 0.01);
}

TEST(AutocorrDecay, ReferenceJumpModelDecays) {
    const auto model = hjs::testing::reference_model();
    const auto path = simulate_path(model, 1e4, IntegratorConfig{ExactOU{}, 0.05}, 33);
    const std::vector<double> lags{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    const auto fit = autocorr_decay(path, make_test_function("x", model), lags, 1000.0);
    EXPECT_GT(fit.rate, 0.0);
    EXPECT_GE(fit.r2, 0.8);
}

TEST(AutocorrDecay, PoissonWindowsAreUncorrelated) {
    // Indicator of at least one event in the last unit of time, sampled on a
    // unit grid: disjoint windows of a Poisson process are independent.
    const auto model = hjs::testing::poisson_model({0.7});
    SimulationOptions o;
    o.record_skeleton = false;
    const double T = 200'000.0;
    const auto path = simulate_path(model, T, kExact, 34, o);
    std::vector<double> series(static_cast<std::size_t>(T), 0.0);
    for (const auto& e : path.events) {
        series[std::min(series.size() - 1, static_cast<std::size_t>(e.time))] = 1.0;
    }
    const std::vector<double> lags{5.0, 10.0, 20.0};
    const auto fit = autocorr_decay(series, 1.0, lags);
    const double noise = 4.0 / std::sqrt(static_cast<double>(series.size()));
    for (double r : fit.autocorrelation) {
        EXPECT_LT(std::abs(r), noise);
    }
}

TEST(AutocorrDecay, RejectsShortSeries) {
    const std::vector<double> s(50, 1.0);
    const std::vector<double> lags{1.0};
    EXPECT_THROW(autocorr_decay(s, 0.1, lags), std::invalid_argument);
}
