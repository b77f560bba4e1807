#include "hjs/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjs::stats {

double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t kLeaf = 32;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("mean: empty input");
    }
    return pairwise_sum(values) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    if (values.size() < 2) {
        return 0.0;
    }
    const double mu = mean(values);
    std::vector<double> sq(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double d = values[k] - mu;
        sq[k] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(values.size() - 1);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("least_squares: size mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("least_squares: need at least two points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx;
        const double dy = y[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("least_squares: x values are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return fit;
}

double kolmogorov_survival(double lambda) noexcept {
    if (lambda <= 0.0) {
        return 1.0;
    }
    if (lambda < 0.3) {
        // Theta-function form converges fast for small lambda.
        const double pi = 3.14159265358979323846;
        const double c = std::sqrt(2.0 * pi) / lambda;
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double a = (2.0 * k - 1.0) * pi / lambda;
            s += std::exp(-a * a / 8.0);
        }
        return std::clamp(1.0 - c * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) {
            break;
        }
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

double stephens_p(double d, double effective_n) {
    const double root = std::sqrt(effective_n);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

} // namespace

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("ks_two_sample: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) {
            ++i;
        }
        while (j < b.size() && b[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, stephens_p(d, na * nb / (na + nb))};
}

TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) {
        throw std::invalid_argument("ks_one_sample: empty sample");
    }
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double f = cdf(sample[k]);
        d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
    }
    return {d, stephens_p(d, n)};
}

double chi_squared_survival(double statistic, double dof) {
    if (!(dof > 0.0)) {
        throw std::invalid_argument("chi_squared_survival: dof must be > 0");
    }
    if (statistic <= 0.0) {
        return 1.0;
    }
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

TestResult chi_squared_gof(std::span<const double> observed, std::span<const double> expected,
                           double min_expected) {
    if (observed.size() != expected.size() || observed.empty()) {
        throw std::invalid_argument("chi_squared_gof: size mismatch or empty input");
    }
    std::vector<double> obs;
    std::vector<double> exp;
    double o = 0.0;
    double e = 0.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        o += observed[k];
        e += expected[k];
        if (e >= min_expected) {
            obs.push_back(o);
            exp.push_back(e);
            o = 0.0;
            e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (exp.empty()) {
            obs.push_back(o);
            exp.push_back(e);
        } else {
            obs.back() += o;
            exp.back() += e;
        }
    }
    if (exp.size() < 2) {
        throw std::invalid_argument("chi_squared_gof: fewer than two cells after pooling");
    }
    double stat = 0.0;
    for (std::size_t k = 0; k < exp.size(); ++k) {
        const double d = obs[k] - exp[k];
        stat += d * d / exp[k];
    }
    return {stat, chi_squared_survival(stat, static_cast<double>(exp.size() - 1))};
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("kendall_tau: need two equal-length series of length >= 2");
    }
    double concordant = 0.0;
    double discordant = 0.0;
    double ties_x = 0.0;
    double ties_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[j] - x[i];
            const double dy = y[j] - y[i];
            if (dx == 0.0 && dy == 0.0) {
                continue;
            }
            if (dx == 0.0) {
                ties_x += 1.0;
            } else if (dy == 0.0) {
                ties_y += 1.0;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    const double denom =
        std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
    return denom > 0.0 ? (concordant - discordant) / denom : 0.0;
}

BatchMeans weighted_batch_means(std::span<const double> numerators,
                                std::span<const double> weights) {
    if (numerators.size() != weights.size() || numerators.empty()) {
        throw std::invalid_argument("weighted_batch_means: size mismatch or empty input");
    }
    BatchMeans out;
    out.batches = numerators.size();
    const double total_w = pairwise_sum(weights);
    if (!(total_w > 0.0)) {
        throw std::invalid_argument("weighted_batch_means: total weight must be > 0");
    }
    out.mean = pairwise_sum(numerators) / total_w;
    if (out.batches < 2) {
        return out;
    }
    // Ratio-estimator variance with normalised weights w_k / mean(w).
    const double kb = static_cast<double>(out.batches);
    const double w_bar = total_w / kb;
    std::vector<double> sq(out.batches);
    for (std::size_t k = 0; k < out.batches; ++k) {
        const double r = numerators[k] - out.mean * weights[k];
        sq[k] = (r / w_bar) * (r / w_bar);
    }
    out.standard_error = std::sqrt(pairwise_sum(sq) / (kb * (kb - 1.0)));
    return out;
}

BatchMeans batch_means(std::span<const double> series, std::size_t batches) {
    if (batches == 0 || series.size() < batches) {
        throw std::invalid_argument("batch_means: series shorter than the batch count");
    }
    const std::size_t len = series.size() / batches;
    std::vector<double> nums(batches);
    std::vector<double> weights(batches, static_cast<double>(len));
    for (std::size_t k = 0; k < batches; ++k) {
        nums[k] = pairwise_sum(series.subspan(k * len, len));
    }
    return weighted_batch_means(nums, weights);
}

} // namespace hjs::stats
