#pragma once

#include "hjs/matrix.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hjs {

/// Thrown when a model or run configuration violates an invariant.
/// `field()` names the offending entry using the config-file path,
/// e.g. "kernel.alpha[0][0]".
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// ---------------------------------------------------------------------------
// Rate functions f_i
// ---------------------------------------------------------------------------

/// f(u) = max(floor, intercept + slope * u), floor > 0.
struct AffineClipped {
    double floor = 0.1;
    double intercept = 1.0;
    double slope = 1.0;
    bool operator==(const AffineClipped&) const = default;
};

/// f(u) = max_rate / (1 + exp(-steepness * (u - center))).
struct Sigmoid {
    double max_rate = 1.0;
    double steepness = 1.0;
    double center = 0.0;
    bool operator==(const Sigmoid&) const = default;
};

/// f(u) = level.
struct ConstantRate {
    double level = 1.0;
    bool operator==(const ConstantRate&) const = default;
};

using RateFunction = std::variant<AffineClipped, Sigmoid, ConstantRate>;

/// Evaluates f(u). Always strictly positive: the sigmoid tail is clamped at
/// the smallest normal double instead of underflowing to zero.
double rate_eval(const RateFunction& f, double u) noexcept;

/// Smallest Lipschitz constant of the parametric family.
double lipschitz_constant(const RateFunction& f) noexcept;

bool is_nondecreasing(const RateFunction& f) noexcept;

// ---------------------------------------------------------------------------
// Kernel h_ij(t) = c_ij exp(-alpha_ij t)
// ---------------------------------------------------------------------------

struct KernelMatrix {
    Matrix c;
    Matrix alpha;
    std::size_t dimension() const noexcept { return c.rows(); }
    bool operator==(const KernelMatrix&) const = default;
};

/// Columns j where two alpha entries coincide or some c_ij is zero. Such
/// kernels simulate fine but the density argument behind the Vandermonde
/// check does not apply to them.
std::vector<std::size_t> degenerate_columns(const KernelMatrix& kernel);

// ---------------------------------------------------------------------------
// Diffusion coefficients
// ---------------------------------------------------------------------------

/// b(x) = -beta * x + offset. A negative beta is accepted and yields a
/// repelling drift, which the frame classifier reports as Neither.
struct LinearDrift {
    double beta = 1.0;
    double offset = 0.0;
    bool operator==(const LinearDrift&) const = default;
};

/// b(x) = offset - amplitude * tanh(x / scale).
struct BoundedSmoothDrift {
    double amplitude = 1.0;
    double scale = 1.0;
    double offset = 0.0;
    bool operator==(const BoundedSmoothDrift&) const = default;
};

using DriftSpec = std::variant<LinearDrift, BoundedSmoothDrift>;

/// sigma(x) = s. s = 0 is allowed for deterministic experiments but fails
/// the ellipticity check.
struct ConstantDiffusion {
    double s = 1.0;
    bool operator==(const ConstantDiffusion&) const = default;
};

/// sigma(x) = s0 + (s1 - s0) * x^2 / (1 + x^2), 0 < s0 <= s1.
struct SmoothBoundedDiffusion {
    double s0 = 1.0;
    double s1 = 1.0;
    bool operator==(const SmoothBoundedDiffusion&) const = default;
};

using DiffusionSpec = std::variant<ConstantDiffusion, SmoothBoundedDiffusion>;

/// a(x) = value.
struct ConstantJump {
    double value = 0.0;
    bool operator==(const ConstantJump&) const = default;
};

/// a(x) = -eta * x, 0 <= eta <= 2.
struct LinearDamping {
    double eta = 0.0;
    bool operator==(const LinearDamping&) const = default;
};

/// a(x) = scale * x * (1 + |x|)^(eta - 1), eta < 1, so |a(x)| <= |scale| |x|^eta.
struct PowerBounded {
    double scale = 1.0;
    double eta = 0.5;
    bool operator==(const PowerBounded&) const = default;
};

using JumpMap = std::variant<ConstantJump, LinearDamping, PowerBounded>;

struct CoefficientSpec {
    DriftSpec drift = LinearDrift{};
    DiffusionSpec diffusion = ConstantDiffusion{};
    JumpMap jump = ConstantJump{};
    bool operator==(const CoefficientSpec&) const = default;
};

double drift_eval(const DriftSpec& b, double x) noexcept;
double drift_lipschitz(const DriftSpec& b) noexcept;
double sigma_eval(const DiffusionSpec& s, double x) noexcept;
bool is_degenerate(const DiffusionSpec& s) noexcept;

/// Bounds (lower, upper) on sigma^2 over the real line.
struct SigmaSquaredBounds {
    double lower;
    double upper;
};
SigmaSquaredBounds sigma_squared_bounds(const DiffusionSpec& s) noexcept;

double jump_eval(const JumpMap& a, double x) noexcept;

// ---------------------------------------------------------------------------
// State and model
// ---------------------------------------------------------------------------

/// Markov state z = (x, y): diffusion position and the M x M memory matrix.
struct State {
    double x = 0.0;
    Matrix y;
    bool operator==(const State&) const = default;
};

struct ModelSpec {
    std::vector<RateFunction> rates;
    KernelMatrix kernel;
    CoefficientSpec coefficients;
    State initial;

    std::size_t dimension() const noexcept { return rates.size(); }
    bool operator==(const ModelSpec&) const = default;
};

/// Checks every invariant; throws ValidationError naming the first bad field.
/// M = 0 is accepted (pure diffusion, used by analysis code).
void validate(const ModelSpec& model);
void validate(const RateFunction& f, const std::string& field);

} // namespace hjs
