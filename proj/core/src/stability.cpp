#include "hjs/stability.hpp"

#include "hjs/diffusion.hpp"
#include "hjs/intensity.hpp"
#include "hjs/parallel.hpp"
#include "hjs/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjs {

namespace {

constexpr double kMaxExponent = 700.0;

double max_entry(const Matrix& H) {
    double m = 0.0;
    for (double v : H.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

void require_smooth_point(const LyapunovSpec& spec, const State& z) {
    for (double v : z.y.values()) {
        if (v == 0.0) {
            throw std::domain_error("generator: V is not differentiable where some y_ij = 0");
        }
    }
    if (spec.frame == Frame::Polynomial && z.x == 0.0) {
        throw std::domain_error("generator: polynomial V is not twice differentiable at x = 0");
    }
}

double v1_value(const LyapunovSpec& spec, double x) {
    if (spec.frame == Frame::Polynomial) {
        return 1.0 + std::pow(std::abs(x), spec.poly_m);
    }
    return x * x;
}

// A^Z V = x_part + exp(S) * y_part.
struct GeneratorParts {
    double x_part = 0.0;
    double y_part = 0.0;
    double exponent = 0.0;
    double v1 = 0.0;
};

GeneratorParts generator_parts(const ModelSpec& model, const LyapunovSpec& spec,
                               const StabilityData& stab, const State& z) {
    require_smooth_point(spec, z);
    const std::size_t m = model.dimension();
    const double x = z.x;
    const auto& coeff = model.coefficients;

    double dv1;
    double d2v1;
    if (spec.frame == Frame::Polynomial) {
        const double p = spec.poly_m;
        const double ax = std::abs(x);
        dv1 = p * std::copysign(std::pow(ax, p - 1.0), x);
        d2v1 = p * (p - 1.0) * std::pow(ax, p - 2.0);
    } else {
        dv1 = 2.0 * x;
        d2v1 = 2.0;
    }
    const double sigma = sigma_eval(coeff.diffusion, x);
    const double v1 = v1_value(spec, x);
    const double v1_jumped = v1_value(spec, apply_x_jump(x, coeff.jump));

    const std::vector<double> lambda = intensities(model, z.y);
    double total = 0.0;
    for (double l : lambda) {
        total += l;
    }

    GeneratorParts parts;
    parts.v1 = v1;
    parts.exponent = lyapunov_exponent(stab, z.y);
    parts.x_part = drift_eval(coeff.drift, x) * dv1 + 0.5 * sigma * sigma * d2v1 +
                   total * (v1_jumped - v1);

    // d/dy_ij exp(S) = m_ij sign(y_ij) exp(S), so the flow term is
    // -exp(S) sum_ij alpha_ij m_ij |y_ij|.
    double flow = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            flow += model.kernel.alpha(i, j) * stab.m(i, j) * std::abs(z.y(i, j));
        }
    }
    double jumps = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double delta = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double y = z.y(i, j);
            delta += stab.m(i, j) * (std::abs(y + model.kernel.c(i, j)) - std::abs(y));
        }
        jumps += lambda[j] * std::expm1(delta);
    }
    parts.y_part = jumps - flow;
    return parts;
}

} // namespace

Matrix build_H(const ModelSpec& model) {
    const std::size_t m = model.dimension();
    Matrix H(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            H(i, j) = lipschitz_constant(model.rates[j]) * std::abs(model.kernel.c(i, j)) /
                      model.kernel.alpha(i, j);
        }
    }
    return H;
}

double perron_residual(const Matrix& H, const std::vector<double>& kappa, double rho) {
    double residual = 0.0;
    for (std::size_t j = 0; j < H.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < H.rows(); ++i) {
            s += kappa[i] * H(i, j);
        }
        residual = std::max(residual, std::abs(s - rho * kappa[j]));
    }
    return residual;
}

PerronData perron_frobenius(const Matrix& H, const PerronOptions& options) {
    if (H.rows() != H.cols()) {
        throw std::invalid_argument("perron_frobenius: matrix must be square");
    }
    for (double v : H.values()) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("perron_frobenius: matrix must be finite and nonnegative");
        }
    }
    const std::size_t n = H.rows();
    PerronData out;
    if (n == 0) {
        return out;
    }
    const double scale = std::max(1.0, max_entry(H));
    const double shift = options.shift * scale;
    const double tolerance = options.tolerance * scale;

    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> u(n);
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += v[i] * H(i, j);
            }
            u[j] = s;
        }
        double rho = 0.0;
        for (double s : u) {
            rho += s;
        }
        double residual = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            residual = std::max(residual, std::abs(u[j] - rho * v[j]));
        }
        if (residual <= tolerance) {
            out.rho = rho;
            out.kappa = v;
            out.residual = residual;
            out.iterations = it;
            return out;
        }
        const double norm = rho + shift;
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = (u[j] + shift * v[j]) / norm;
        }
        // Renormalise against drift in the l1 norm.
        double total = 0.0;
        for (double s : v) {
            total += s;
        }
        for (double& s : v) {
            s /= total;
        }
    }
    throw ConvergenceError("perron_frobenius: no convergence within " +
                           std::to_string(options.max_iterations) + " iterations");
}

double spectral_radius(const Matrix& H, const PerronOptions& options) {
    return perron_frobenius(H, options).rho;
}

std::vector<double> perron_left_vector(const Matrix& H, const PerronOptions& options) {
    return perron_frobenius(H, options).kappa;
}

StabilityData compute_stability(const ModelSpec& model, const PerronOptions& options) {
    StabilityData stab;
    stab.H = build_H(model);
    const PerronData pf = perron_frobenius(stab.H, options);
    stab.rho = pf.rho;
    stab.kappa = pf.kappa;
    const std::size_t m = model.dimension();
    stab.m = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            stab.m(i, j) = stab.kappa[i] / model.kernel.alpha(i, j);
        }
    }
    return stab;
}

std::string to_string(Frame frame) {
    switch (frame) {
    case Frame::Exponential:
        return "exponential";
    case Frame::Polynomial:
        return "polynomial";
    case Frame::Neither:
        break;
    }
    return "neither";
}

LyapunovSpec LyapunovSpec::polynomial(double m) {
    if (!(m > 2.0) || !std::isfinite(m)) {
        throw std::invalid_argument("LyapunovSpec: polynomial exponent must be finite and > 2");
    }
    return {Frame::Polynomial, m};
}

std::string polynomial_exponent_warning(double m, double gamma, double sigma1) {
    const double upper = sigma1 > 0.0 ? 1.0 + 2.0 * gamma / (sigma1 * sigma1)
                                      : std::numeric_limits<double>::infinity();
    if (m > 2.0 && m < upper) {
        return {};
    }
    return "polynomial exponent " + std::to_string(m) + " is outside (2, " +
           std::to_string(upper) + ")";
}

double lyapunov_exponent(const StabilityData& stab, const Matrix& y) {
    double s = 0.0;
    const auto weights = stab.m.values();
    const auto values = y.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
        s += weights[k] * std::abs(values[k]);
    }
    return s;
}

double lyapunov_value(const LyapunovSpec& spec, const StabilityData& stab, const State& z) {
    const double exponent = lyapunov_exponent(stab, z.y);
    if (exponent > kMaxExponent) {
        throw std::overflow_error("lyapunov_value: exponent " + std::to_string(exponent) +
                                  " exceeds 700");
    }
    return v1_value(spec, z.x) + std::exp(exponent);
}

double generator_apply(const ModelSpec& model, const LyapunovSpec& spec,
                       const StabilityData& stab, const State& z) {
    const GeneratorParts parts = generator_parts(model, spec, stab, z);
    if (parts.exponent > kMaxExponent) {
        throw std::overflow_error("generator_apply: exponent exceeds 700; use generator_ratio");
    }
    const double value = parts.x_part + std::exp(parts.exponent) * parts.y_part;
    if (!std::isfinite(value)) {
        throw std::overflow_error("generator_apply: value is not finite");
    }
    return value;
}

namespace {

struct RatioAndWeight {
    double ratio;
    double log_weight;
};

RatioAndWeight ratio_and_weight(const ModelSpec& model, const LyapunovSpec& spec,
                                const StabilityData& stab, const State& z) {
    const GeneratorParts p = generator_parts(model, spec, stab, z);
    const double log_v1 = p.v1 > 0.0 ? std::log(p.v1) : -std::numeric_limits<double>::infinity();
    const double top = std::max(log_v1, p.exponent);
    const double a = std::exp(-top);
    const double b = std::exp(p.exponent - top);
    const double over_v = (p.x_part * a + p.y_part * b) / (p.v1 * a + b);
    const double log_v = top + std::log(p.v1 * a + b);
    if (spec.frame == Frame::Polynomial) {
        const double alpha = spec.alpha_exp();
        return {over_v * std::exp(alpha * log_v), (1.0 - alpha) * log_v};
    }
    return {over_v, log_v};
}

} // namespace

double generator_ratio(const ModelSpec& model, const LyapunovSpec& spec,
                       const StabilityData& stab, const State& z) {
    return ratio_and_weight(model, spec, stab, z).ratio;
}

DriftScanResult drift_scan(const ModelSpec& model, const LyapunovSpec& spec,
                           const StabilityData& stab, const ScanRegion& region,
                           const DriftScanOptions& options) {
    if (!(region.x_radius > 0.0 && region.y_radius > 0.0)) {
        throw std::invalid_argument("drift_scan: region radii must be > 0");
    }
    if (options.n_points == 0) {
        throw std::invalid_argument("drift_scan: need at least one point");
    }
    const std::size_t m = model.dimension();
    const std::size_t n = options.n_points;

    std::vector<State> states(n);
    std::vector<double> ratios(n);
    std::vector<double> log_w(n);
    parallel_for(n, options.threads, [&](std::size_t k) {
        RandomStream rng(mix_seed(options.seed, k));
        State z;
        z.y = Matrix(m, m);
        do {
            z.x = region.x_radius * (2.0 * rng.uniform() - 1.0);
        } while (spec.frame == Frame::Polynomial && z.x == 0.0);
        for (double& v : z.y.values()) {
            do {
                v = region.y_radius * (2.0 * rng.uniform() - 1.0);
            } while (v == 0.0);
        }
        const auto rw = ratio_and_weight(model, spec, stab, z);
        ratios[k] = rw.ratio;
        log_w[k] = rw.log_weight;
        states[k] = std::move(z);
    });

    DriftScanResult result;
    result.points = n;

    std::vector<double> sorted = log_w;
    const auto q = static_cast<std::size_t>(
        std::clamp(options.far_field_quantile, 0.0, 1.0) * static_cast<double>(n - 1));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q), sorted.end());
    const double threshold = sorted[q];

    double far_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (ratios[k] > 0.0) {
            ++result.positive_generator_points;
        }
        if (log_w[k] >= threshold) {
            ++result.far_field_points;
            far_max = std::max(far_max, ratios[k]);
        }
    }
    result.far_field_max_ratio = far_max;
    result.d2 = -far_max;
    result.success = result.d2 > 0.0;

    double d1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (log_w[k] < threshold) {
            d1 = std::max(d1, std::exp(log_w[k]) * (ratios[k] + result.d2));
        }
    }
    result.d1 = d1;

    for (std::size_t k = 0; k < n; ++k) {
        // A V > d1 - d2 W + tol, divided through by W.
        const double inv_w = std::exp(-log_w[k]);
        if (ratios[k] + result.d2 > (d1 + options.tolerance) * inv_w) {
            ++result.violation_count;
            if (result.violations.size() < options.max_reported) {
                const double w = std::exp(log_w[k]);
                result.violations.push_back({states[k], ratios[k] * w, d1 - result.d2 * w});
            }
        }
    }

    if (!result.success) {
        result.message = "no positive d2: A V / W reaches " + std::to_string(far_max) +
                         " on the far field";
    }
    return result;
}

VandermondeResult vandermonde_determinant(const std::vector<double>& rates, double t0) {
    if (!(t0 > 0.0)) {
        throw std::invalid_argument("vandermonde: t0 must be > 0");
    }
    const std::size_t n = rates.size();
    Matrix V(n, n);
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double power = static_cast<double>(n - 1 - k);
            V(i, k) = std::exp(-power * rates[i] * t0);
            row_max = std::max(row_max, std::abs(V(i, k)));
        }
        scale *= row_max;
    }
    VandermondeResult out;
    out.determinant = determinant(V);
    out.invertible = std::abs(out.determinant) > 1e-12 * scale;
    return out;
}

VandermondeResult vandermonde_check(const KernelMatrix& kernel, std::size_t j, double t0) {
    const std::size_t m = kernel.dimension();
    if (j >= m) {
        throw std::out_of_range("vandermonde_check: column index out of range");
    }
    std::vector<double> rates(m);
    for (std::size_t i = 0; i < m; ++i) {
        rates[i] = kernel.alpha(i, j);
        for (std::size_t k = 0; k < i; ++k) {
            if (rates[k] == rates[i]) {
                throw std::invalid_argument("vandermonde_check: column " + std::to_string(j) +
                                            " has repeated decay rates");
            }
        }
    }
    return vandermonde_determinant(rates, t0);
}

} // namespace hjs
