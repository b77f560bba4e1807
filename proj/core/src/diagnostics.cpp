#include "hjs/diagnostics.hpp"

#include "hjs/engine.hpp"
#include "hjs/parallel.hpp"
#include "hjs/random.hpp"
#include "hjs/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hjs {

TestFunction make_test_function(const std::string& name, const ModelSpec& model) {
    if (name == "one") {
        return [](double, std::span<const double>) { return 1.0; };
    }
    if (name == "x") {
        return [](double x, std::span<const double>) { return x; };
    }
    if (name == "x2") {
        return [](double x, std::span<const double>) { return x * x; };
    }
    if (name == "rate") {
        return [rates = model.rates](double, std::span<const double> sums) {
            double total = 0.0;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                total += rate_eval(rates[i], sums[i]);
            }
            return total;
        };
    }
    throw std::invalid_argument("unknown test function \"" + name + "\" (expected one, x, x2, rate)");
}

ErgodicEstimate time_average(const Path& path, const TestFunction& g, double burn_in,
                             std::size_t batches) {
    const auto& sk = path.skeleton;
    const double horizon = path.horizon;
    if (!(burn_in >= 0.0) || !(horizon > burn_in)) {
        throw std::invalid_argument("time_average: path horizon must exceed the burn-in");
    }
    if (batches < 20) {
        throw std::invalid_argument("time_average: at least 20 batches are required");
    }
    if (sk.size() < 2 || sk.time(0) > burn_in || sk.time(sk.size() - 1) < horizon) {
        throw std::invalid_argument("time_average: skeleton does not cover [burn_in, horizon]");
    }

    // Integrate g - g(z_0) so that a constant g comes back bit-exact.
    std::vector<double> values(sk.size());
    for (std::size_t k = 0; k < sk.size(); ++k) {
        values[k] = g(sk.x(k), sk.row_sums(k));
    }
    const double shift = values[0];
    for (double& v : values) {
        v -= shift;
    }

    const double span = horizon - burn_in;
    std::vector<double> edges(batches + 1);
    for (std::size_t b = 0; b <= batches; ++b) {
        edges[b] = burn_in + span * static_cast<double>(b) / static_cast<double>(batches);
    }
    edges[batches] = horizon;

    std::vector<double> integrals(batches, 0.0);
    std::vector<double> lengths(batches, 0.0);
    std::size_t b = 0;
    for (std::size_t k = 0; k + 1 < sk.size(); ++k) {
        const double t0 = sk.time(k);
        const double t1 = sk.time(k + 1);
        if (!(t1 > t0) || t1 <= burn_in) {
            continue;
        }
        const double v0 = values[k];
        const double slope = (values[k + 1] - v0) / (t1 - t0);
        double a = std::max(t0, burn_in);
        const double end = std::min(t1, horizon);
        while (a < end && b < batches) {
            const double stop = std::min(end, edges[b + 1]);
            const double va = v0 + slope * (a - t0);
            const double vb = v0 + slope * (stop - t0);
            integrals[b] += 0.5 * (va + vb) * (stop - a);
            lengths[b] += stop - a;
            a = stop;
            if (stop >= edges[b + 1]) {
                ++b;
            }
        }
    }

    const auto bm = stats::weighted_batch_means(integrals, lengths);
    ErgodicEstimate out;
    out.value = shift + bm.mean;
    out.batch_count = bm.batches;
    out.standard_error = bm.standard_error;
    out.burn_in = burn_in;
    return out;
}

std::vector<double> pooled_x_samples(std::span<const Path> paths, double burn_in) {
    std::vector<double> out;
    for (const auto& p : paths) {
        const auto& sk = p.skeleton;
        for (std::size_t k = 0; k < sk.size(); ++k) {
            if (sk.kind(k) == SampleKind::Grid && sk.time(k) >= burn_in) {
                out.push_back(sk.x(k));
            }
        }
    }
    return out;
}

DensityEstimate invariant_histogram(std::span<const double> samples, std::size_t bins,
                                    Interval compact, std::optional<Interval> range) {
    if (samples.empty()) {
        throw std::invalid_argument("invariant_histogram: empty ensemble");
    }
    if (bins == 0) {
        throw std::invalid_argument("invariant_histogram: bins must be >= 1");
    }
    if (!(compact.hi >= compact.lo)) {
        throw std::invalid_argument("invariant_histogram: compact interval is empty");
    }
    Interval r;
    if (range) {
        r = *range;
    } else {
        const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
        r = {*lo, *hi};
    }
    if (!(r.hi > r.lo)) {
        throw std::invalid_argument("invariant_histogram: degenerate range");
    }

    DensityEstimate est;
    est.positivity_compact = compact;
    est.bin_edges.resize(bins + 1);
    const double width = (r.hi - r.lo) / static_cast<double>(bins);
    for (std::size_t k = 0; k <= bins; ++k) {
        est.bin_edges[k] = r.lo + width * static_cast<double>(k);
    }
    est.bin_edges[bins] = r.hi;

    std::vector<std::size_t> counts(bins, 0);
    for (double v : samples) {
        if (v < r.lo || v > r.hi) {
            ++est.outside;
            continue;
        }
        const auto k = std::min(bins - 1, static_cast<std::size_t>((v - r.lo) / width));
        ++counts[k];
        ++est.sample_count;
    }
    if (est.sample_count == 0) {
        throw std::invalid_argument("invariant_histogram: no samples inside the range");
    }
    est.bin_masses.resize(bins);
    const double n = static_cast<double>(est.sample_count);
    for (std::size_t k = 0; k < bins; ++k) {
        est.bin_masses[k] = static_cast<double>(counts[k]) / n;
    }

    est.min_mass_on_compact = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bins; ++k) {
        if (est.bin_edges[k + 1] >= compact.lo && est.bin_edges[k] <= compact.hi) {
            est.min_mass_on_compact = std::min(est.min_mass_on_compact, est.bin_masses[k]);
        }
    }
    if (!std::isfinite(est.min_mass_on_compact)) {
        est.min_mass_on_compact = 0.0;
    }
    return est;
}

namespace {

struct NullMoments {
    double mean;
    double variance;
};

// Moments of |Ca / na - Cb / nb| given Ca + Cb = total, when both samples
// come from one law: then Ca ~ Binomial(total, na / (na + nb)).
NullMoments null_abs_difference(double total, double na, double nb) {
    const auto s = static_cast<std::size_t>(total);
    const double q = na / (na + nb);
    const double log_q = std::log(q);
    const double log_r = std::log1p(-q);
    const double log_s = std::lgamma(total + 1.0);
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t k = 0; k <= s; ++k) {
        const double kd = static_cast<double>(k);
        const double w = std::exp(log_s - std::lgamma(kd + 1.0) - std::lgamma(total - kd + 1.0) +
                                  kd * log_q + (total - kd) * log_r);
        const double d = kd / na - (total - kd) / nb;
        mean += w * std::abs(d);
        second += w * d * d;
    }
    return {mean, std::max(0.0, second - mean * mean)};
}

} // namespace

TvEstimate histogram_tv(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b, std::size_t bins) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("histogram_tv: empty sample");
    }
    if (bins == 0) {
        throw std::invalid_argument("histogram_tv: bins must be >= 1");
    }
    const std::size_t dims = a.front().size();
    std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
    for (const auto* sample : {&a, &b}) {
        for (const auto& row : *sample) {
            if (row.size() != dims) {
                throw std::invalid_argument("histogram_tv: inconsistent feature count");
            }
            for (std::size_t c = 0; c < dims; ++c) {
                lo[c] = std::min(lo[c], row[c]);
                hi[c] = std::max(hi[c], row[c]);
            }
        }
    }
    bool any_spread = false;
    for (std::size_t c = 0; c < dims; ++c) {
        any_spread = any_spread || hi[c] > lo[c];
    }
    if (!any_spread) {
        throw std::invalid_argument("histogram_tv: degenerate histogram (all samples in one bin)");
    }

    std::map<std::vector<std::uint32_t>, std::array<double, 2>> cells;
    std::vector<std::uint32_t> key(dims);
    auto add = [&](const std::vector<std::vector<double>>& sample, std::size_t slot) {
        for (const auto& row : sample) {
            for (std::size_t c = 0; c < dims; ++c) {
                std::size_t idx = 0;
                if (hi[c] > lo[c]) {
                    const double u = (row[c] - lo[c]) / (hi[c] - lo[c]);
                    idx = std::min(bins - 1, static_cast<std::size_t>(u * static_cast<double>(bins)));
                }
                key[c] = static_cast<std::uint32_t>(idx);
            }
            cells[key][slot] += 1.0;
        }
    };
    add(a, 0);
    add(b, 1);

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    TvEstimate out;
    double null_var = 0.0;
    for (const auto& [k, counts] : cells) {
        out.tv += std::abs(counts[0] / na - counts[1] / nb);
        const auto null = null_abs_difference(counts[0] + counts[1], na, nb);
        out.noise_floor += null.mean;
        null_var += null.variance;
    }
    out.tv = std::clamp(0.5 * out.tv, 0.0, 1.0);
    out.noise_floor = std::min(0.5 * out.noise_floor, 1.0);
    out.noise_sd = 0.5 * std::sqrt(null_var);
    return out;
}

MixingCurve mixing_curve(const ModelSpec& model, const State& z_a, const State& z_b,
                         std::span<const double> times, const MixingOptions& options) {
    if (times.empty()) {
        throw std::invalid_argument("mixing_curve: no times");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || (k > 0 && !(times[k] > times[k - 1]))) {
            throw std::invalid_argument("mixing_curve: times must be >= 0 and strictly increasing");
        }
    }
    if (options.n_paths < 1000) {
        throw std::invalid_argument("mixing_curve: n_paths must be >= 1000");
    }
    validate(model);
    validate(options.integrator, model.coefficients);

    const std::size_t n = options.n_paths;
    const std::size_t m = model.dimension();
    const std::size_t n_times = times.size();
    SimulationOptions sim;
    sim.record_skeleton = false;
    sim.observation_times.assign(times.begin(), times.end());

    // features[t][path] = (x, row sums of y); paths [0, n) from z_a.
    std::vector<std::vector<std::vector<double>>> features(
        n_times, std::vector<std::vector<double>>(2 * n));
    const std::size_t threads = options.threads ? options.threads : default_thread_count();
    parallel_for(2 * n, threads, [&](std::size_t k) {
        SimulationOptions local = sim;
        local.start = k < n ? z_a : z_b;
        const Path p = simulate_path(model, times.back(), options.integrator,
                                     mix_seed(options.seed, k), local);
        for (std::size_t t = 0; t < n_times; ++t) {
            const State& z = p.observations[t];
            std::vector<double> row(1 + m);
            row[0] = z.x;
            row_sums(z.y, std::span<double>(row).subspan(1));
            features[t][k] = std::move(row);
        }
    });

    MixingCurve curve;
    curve.times.assign(times.begin(), times.end());
    for (std::size_t t = 0; t < n_times; ++t) {
        const std::vector<std::vector<double>> a(features[t].begin(), features[t].begin() + n);
        const std::vector<std::vector<double>> b(features[t].begin() + n, features[t].end());
        const auto est = histogram_tv(a, b, options.bins);
        curve.tv_estimates.push_back(est.tv);
        curve.noise_floor.push_back(est.noise_floor);
        curve.noise_sd.push_back(est.noise_sd);
    }

    std::vector<double> ft;
    std::vector<double> flog;
    std::vector<double> ftv;
    for (std::size_t t = 0; t < n_times; ++t) {
        if (!(curve.tv_estimates[t] > curve.noise_floor[t] + 3.0 * curve.noise_sd[t])) {
            break;
        }
        ft.push_back(curve.times[t]);
        flog.push_back(std::log(curve.tv_estimates[t]));
        ftv.push_back(curve.tv_estimates[t]);
    }
    curve.fit_points = ft.size();
    if (ft.size() >= 2) {
        const auto fit = stats::least_squares(ft, flog);
        curve.fitted_rate = -fit.slope;
        curve.fitted_log_c = fit.intercept;
        curve.fit_r2 = fit.r2;
        curve.kendall_tau = stats::kendall_tau(ft, ftv);
    }
    return curve;
}

AutocorrFit autocorr_decay(std::span<const double> series, double spacing,
                           std::span<const double> lags) {
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("autocorr_decay: spacing must be > 0");
    }
    if (lags.empty()) {
        throw std::invalid_argument("autocorr_decay: no lags");
    }
    std::size_t max_index = 0;
    std::vector<std::size_t> index(lags.size());
    for (std::size_t k = 0; k < lags.size(); ++k) {
        if (!(lags[k] >= 0.0)) {
            throw std::invalid_argument("autocorr_decay: lags must be >= 0");
        }
        index[k] = static_cast<std::size_t>(std::llround(lags[k] / spacing));
        max_index = std::max(max_index, index[k]);
    }
    if (series.size() < 2 || series.size() < 10 * max_index) {
        throw std::invalid_argument("autocorr_decay: series too short for the largest lag");
    }
    const double mu = stats::mean(series);
    std::vector<double> centred(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) {
        centred[k] = series[k] - mu;
    }
    std::vector<double> prod(series.size());
    auto autocov = [&](std::size_t lag) {
        const std::size_t len = series.size() - lag;
        for (std::size_t i = 0; i < len; ++i) {
            prod[i] = centred[i] * centred[i + lag];
        }
        return stats::pairwise_sum(std::span<const double>(prod).first(len)) /
               static_cast<double>(series.size());
    };
    const double c0 = autocov(0);
    if (!(c0 > 0.0)) {
        throw std::invalid_argument("autocorr_decay: constant series");
    }

    AutocorrFit out;
    std::vector<double> fx;
    std::vector<double> fy;
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const double rho = autocov(index[k]) / c0;
        out.lags.push_back(static_cast<double>(index[k]) * spacing);
        out.autocorrelation.push_back(rho);
        if (rho > 0.0) {
            fx.push_back(out.lags.back());
            fy.push_back(std::log(rho));
        }
    }
    out.fit_points = fx.size();
    if (fx.size() >= 2) {
        const auto fit = stats::least_squares(fx, fy);
        out.rate = -fit.slope;
        out.r2 = fit.r2;
    }
    return out;
}

AutocorrFit autocorr_decay(const Path& path, const TestFunction& g,
                           std::span<const double> lags, double burn_in) {
    const auto& sk = path.skeleton;
    std::vector<double> series;
    std::vector<double> grid_times;
    for (std::size_t k = 0; k < sk.size(); ++k) {
        if (sk.kind(k) == SampleKind::Grid && sk.time(k) >= burn_in) {
            series.push_back(g(sk.x(k), sk.row_sums(k)));
            grid_times.push_back(sk.time(k));
        }
    }
    if (series.size() < 2) {
        throw std::invalid_argument("autocorr_decay: fewer than two grid samples after burn-in");
    }
    const double spacing = (grid_times.back() - grid_times.front()) /
                           static_cast<double>(grid_times.size() - 1);
    return autocorr_decay(series, spacing, lags);
}

} // namespace hjs
