#pragma once

#include "hjs/diffusion.hpp"
#include "hjs/model.hpp"
#include "hjs/path.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hjs {

/// g(z) seen through the skeleton: the diffusion value and the row sums of y.
using TestFunction = std::function<double(double x, std::span<const double> row_sums)>;

/// "one", "x", "x2" or "rate" (total intensity sum_i f_i(row_sum_i)).
TestFunction make_test_function(const std::string& name, const ModelSpec& model);

struct ErgodicEstimate {
    double value = 0.0;
    std::size_t batch_count = 0;
    double standard_error = 0.0;
    double burn_in = 0.0;
};

/// (1 / (T - burn_in)) * integral of g over [burn_in, T], trapezoidal over
/// the skeleton samples, with a batch-means standard error over `batches`
/// equal time windows. A constant g is returned exactly.
ErgodicEstimate time_average(const Path& path, const TestFunction& g, double burn_in,
                             std::size_t batches = 20);

/// Grid samples of x at times >= burn_in, pooled over paths in order.
std::vector<double> pooled_x_samples(std::span<const Path> paths, double burn_in);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct DensityEstimate {
    std::vector<double> bin_edges;
    std::vector<double> bin_masses;
    Interval positivity_compact;
    /// Smallest mass among bins that intersect the compact.
    double min_mass_on_compact = 0.0;
    std::size_t sample_count = 0;
    /// Samples outside an explicit range; they are not counted.
    std::size_t outside = 0;
};

/// Equal-width histogram over `range` (default: sample min to max).
DensityEstimate invariant_histogram(std::span<const double> samples, std::size_t bins,
                                    Interval compact, std::optional<Interval> range = std::nullopt);

struct MixingOptions {
    std::size_t n_paths = 1000;
    std::size_t bins = 30;
    IntegratorConfig integrator;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

struct MixingCurve {
    std::vector<double> times;
    std::vector<double> tv_estimates;
    /// Expected TV between two samples of the same law, per time.
    std::vector<double> noise_floor;
    /// Standard deviation of that null TV, per time.
    std::vector<double> noise_sd;
    /// Fitted log TV = log c - theta t on the leading run of times whose TV
    /// exceeds noise_floor + 3 noise_sd; later points are noise dominated.
    double fitted_rate = 0.0;
    double fitted_log_c = 0.0;
    double fit_r2 = 0.0;
    std::size_t fit_points = 0;
    /// Kendall tau of (t, TV) over the fitted points.
    double kendall_tau = 0.0;
};

/// Histogram TV distance between the laws of Z_t from two starts, using x
/// and the M row sums of y on shared per-coordinate bins. Paths from z_a use
/// seeds mix_seed(seed, k), from z_b mix_seed(seed, n_paths + k).
MixingCurve mixing_curve(const ModelSpec& model, const State& z_a, const State& z_b,
                         std::span<const double> times, const MixingOptions& options);

/// Joint-histogram TV between two point clouds given as rows of features.
/// Also returns the mean and standard deviation of the TV estimate when both
/// clouds come from one law: each cell's pooled count is split binomially
/// between the samples, cells taken as independent. Throws if every
/// coordinate is constant.
struct TvEstimate {
    double tv = 0.0;
    double noise_floor = 0.0;
    double noise_sd = 0.0;
};
TvEstimate histogram_tv(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b, std::size_t bins);

struct AutocorrFit {
    std::vector<double> lags;
    std::vector<double> autocorrelation;
    /// -slope of log rho against lag, over lags with rho > 0.
    double rate = 0.0;
    double r2 = 0.0;
    std::size_t fit_points = 0;
};

/// Autocorrelation of an evenly spaced series at the given time lags.
/// Requires the series to span at least ten times the largest lag.
AutocorrFit autocorr_decay(std::span<const double> series, double spacing,
                           std::span<const double> lags);

/// Same on g evaluated at the grid samples of a path after burn_in.
AutocorrFit autocorr_decay(const Path& path, const TestFunction& g,
                           std::span<const double> lags, double burn_in);

} // namespace hjs
