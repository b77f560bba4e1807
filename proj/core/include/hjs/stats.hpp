#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hjs::stats {

/// Pairwise (cascade) summation; fixed association order for a given length.
double pairwise_sum(std::span<const double> values) noexcept;
double mean(std::span<const double> values);
/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> values);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Coefficient of determination, clamped to [0, 1].
    double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda) noexcept;

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and
/// Stephens' small-sample correction.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Upper tail of the chi-squared distribution.
double chi_squared_survival(double statistic, double dof);

/// Pearson goodness of fit. Adjacent cells are pooled until each has an
/// expected count of at least `min_expected`.
TestResult chi_squared_gof(std::span<const double> observed, std::span<const double> expected,
                           double min_expected = 5.0);

/// Kendall tau-b.
double kendall_tau(std::span<const double> x, std::span<const double> y);

struct BatchMeans {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t batches = 0;
};

/// Weighted batch means: batch k has value numerators[k] / weights[k]; the
/// overall mean is sum(numerators) / sum(weights) and the standard error is
/// the weight-adjusted spread of the batch values.
BatchMeans weighted_batch_means(std::span<const double> numerators,
                                std::span<const double> weights);

/// Equal-size non-overlapping batches of a series.
BatchMeans batch_means(std::span<const double> series, std::size_t batches);

} // namespace hjs::stats
