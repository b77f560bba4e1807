#pragma once

#include "hjs/matrix.hpp"
#include "hjs/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjs {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// H_ij = gamma_j |c_ij| / alpha_ij.
Matrix build_H(const ModelSpec& model);

struct PerronOptions {
    /// Diagonal shift that breaks periodicity, relative to max(1, max entry).
    double shift = 1e-12;
    std::size_t max_iterations = 100'000;
    /// Stop once ||v H - rho v||_inf drops below this.
    double tolerance = 1e-13;
};

struct PerronData {
    double rho = 0.0;
    /// Left eigenvector, nonnegative and summing to one.
    std::vector<double> kappa;
    double residual = 0.0;
    std::size_t iterations = 0;
};

/// Power iteration on the transpose of H + shift I. Throws ConvergenceError
/// when the residual does not reach the tolerance.
PerronData perron_frobenius(const Matrix& H, const PerronOptions& options = {});
double spectral_radius(const Matrix& H, const PerronOptions& options = {});
std::vector<double> perron_left_vector(const Matrix& H, const PerronOptions& options = {});

/// ||kappa H - rho kappa||_inf.
double perron_residual(const Matrix& H, const std::vector<double>& kappa, double rho);

struct StabilityData {
    Matrix H;
    double rho = 0.0;
    std::vector<double> kappa;
    /// m_ij = kappa_i / alpha_ij.
    Matrix m;
};

StabilityData compute_stability(const ModelSpec& model, const PerronOptions& options = {});

enum class Frame { Exponential, Polynomial, Neither };
std::string to_string(Frame frame);

/// Lyapunov function V = V1(x) + exp(sum_ij m_ij |y_ij|) with
/// V1 = x^2 (Exponential) or 1 + |x|^m (Polynomial).
struct LyapunovSpec {
    Frame frame = Frame::Exponential;
    double poly_m = 0.0;
    double alpha_exp() const noexcept { return poly_m > 0.0 ? 2.0 / poly_m : 0.0; }

    static LyapunovSpec exponential() { return {Frame::Exponential, 0.0}; }
    static LyapunovSpec polynomial(double m);
};

/// Warning text when m is outside (2, 1 + 2 gamma / sigma1^2), empty if fine.
std::string polynomial_exponent_warning(double m, double gamma, double sigma1);

/// sum_ij m_ij |y_ij|, the exponent of the memory part of V.
double lyapunov_exponent(const StabilityData& stab, const Matrix& y);

/// Throws std::overflow_error when the exponent exceeds 700.
double lyapunov_value(const LyapunovSpec& spec, const StabilityData& stab, const State& z);

/// Extended generator A^Z V at z, evaluated term by term with closed-form
/// derivatives. Throws std::domain_error where V is not differentiable
/// (some y_ij = 0, or x = 0 in the polynomial frame) and
/// std::overflow_error when V itself overflows.
double generator_apply(const ModelSpec& model, const LyapunovSpec& spec,
                       const StabilityData& stab, const State& z);

/// A^Z V(z) / W(z) with W = V (exponential) or V^(1 - 2/m) (polynomial),
/// computed on the log scale so that far-field states do not overflow.
double generator_ratio(const ModelSpec& model, const LyapunovSpec& spec,
                       const StabilityData& stab, const State& z);

struct ScanRegion {
    double x_radius = 20.0;
    double y_radius = 20.0;
};

struct DriftViolation {
    State z;
    double generator = 0.0;
    double bound = 0.0;
};

struct DriftScanOptions {
    std::size_t n_points = 10'000;
    std::uint64_t seed = 1;
    /// Points whose log W exceeds this quantile of the sample form the far field.
    double far_field_quantile = 0.5;
    double tolerance = 1e-9;
    std::size_t threads = 0;
    /// At most this many violations are kept; the total is always counted.
    std::size_t max_reported = 20;
};

struct DriftScanResult {
    bool success = false;
    double d1 = 0.0;
    double d2 = 0.0;
    /// max over the far field of A V / W.
    double far_field_max_ratio = 0.0;
    std::size_t points = 0;
    std::size_t far_field_points = 0;
    std::size_t positive_generator_points = 0;
    std::size_t violation_count = 0;
    std::vector<DriftViolation> violations;
    std::string message;
};

/// Samples states uniformly in the box (resampling exact zeros), fits
/// d2 = -max_far A V / W and the smallest d1 making A V <= d1 - d2 W hold on
/// the near field, then reports every sampled point breaking the fitted
/// inequality by more than the tolerance. success = (d2 > 0).
DriftScanResult drift_scan(const ModelSpec& model, const LyapunovSpec& spec,
                           const StabilityData& stab, const ScanRegion& region,
                           const DriftScanOptions& options = {});

struct VandermondeResult {
    double determinant = 0.0;
    bool invertible = false;
};

/// Determinant of the matrix with rows (e^{-(M-1) a_i t0}, ..., e^{-a_i t0}, 1).
VandermondeResult vandermonde_determinant(const std::vector<double>& rates, double t0);

/// Vandermonde check for column j of the kernel. Throws std::invalid_argument
/// when the column has repeated decay rates.
VandermondeResult vandermonde_check(const KernelMatrix& kernel, std::size_t j, double t0);

} // namespace hjs
