#pragma once

#include "hjs/model.hpp"
#include "hjs/random.hpp"

#include <variant>

namespace hjs {

/// Euler-Maruyama with substep `step`; the last substep of each interval is
/// shortened so the interval ends exactly on its target time.
struct EulerMaruyama {
    double step = 1e-3;
    bool operator==(const EulerMaruyama&) const = default;
};

/// Exact Gaussian transition; requires a linear drift and constant sigma.
struct ExactOU {
    bool operator==(const ExactOU&) const = default;
};

using IntegrationScheme = std::variant<EulerMaruyama, ExactOU>;

struct IntegratorConfig {
    IntegrationScheme scheme = ExactOU{};
    /// Spacing of the regular skeleton grid.
    double grid_dt = 0.01;
    bool operator==(const IntegratorConfig&) const = default;
};

/// Throws ValidationError when the scheme does not fit the coefficients.
void validate(const IntegratorConfig& cfg, const CoefficientSpec& coefficients);

/// Moves x forward by dt along the between-jump diffusion. Noise is drawn
/// from `noise` only when sigma is not identically zero.
double advance_diffusion(double x, double dt, const CoefficientSpec& coefficients,
                         const IntegratorConfig& cfg, RandomStream& noise);

/// Post-jump position x + a(x).
double apply_x_jump(double x, const JumpMap& a) noexcept;

/// Mean and variance of the exact transition of dX = (-beta X + offset) dt + s dW.
struct GaussianTransition {
    double mean;
    double variance;
};
GaussianTransition ou_transition(const LinearDrift& drift, double s, double x, double dt) noexcept;

} // namespace hjs
