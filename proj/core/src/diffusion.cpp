#include "hjs/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace hjs {

void validate(const IntegratorConfig& cfg, const CoefficientSpec& coefficients) {
    if (!(std::isfinite(cfg.grid_dt) && cfg.grid_dt > 0.0)) {
        throw ValidationError("integrator.grid_dt", "must be finite and > 0");
    }
    if (const auto* em = std::get_if<EulerMaruyama>(&cfg.scheme)) {
        if (!(std::isfinite(em->step) && em->step > 0.0)) {
            throw ValidationError("integrator.step", "must be finite and > 0");
        }
        return;
    }
    if (!std::holds_alternative<LinearDrift>(coefficients.drift) ||
        !std::holds_alternative<ConstantDiffusion>(coefficients.diffusion)) {
        throw ValidationError("integrator.scheme",
                              "exact_ou requires a linear drift and constant diffusion");
    }
}

GaussianTransition ou_transition(const LinearDrift& drift, double s, double x, double dt) noexcept {
    const double beta = drift.beta;
    if (beta == 0.0) {
        return {x + drift.offset * dt, s * s * dt};
    }
    const double decay = std::exp(-beta * dt);
    const double centre = drift.offset / beta;
    // -expm1(-2 beta dt) keeps precision for small beta dt.
    const double variance = s * s * (-std::expm1(-2.0 * beta * dt)) / (2.0 * beta);
    return {centre + (x - centre) * decay, variance};
}

double advance_diffusion(double x, double dt, const CoefficientSpec& coefficients,
                         const IntegratorConfig& cfg, RandomStream& noise) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("advance_diffusion: dt must be > 0");
    }
    const bool deterministic = is_degenerate(coefficients.diffusion);

    if (std::holds_alternative<ExactOU>(cfg.scheme)) {
        const auto* drift = std::get_if<LinearDrift>(&coefficients.drift);
        const auto* sigma = std::get_if<ConstantDiffusion>(&coefficients.diffusion);
        if (drift == nullptr || sigma == nullptr) {
            throw std::invalid_argument(
                "advance_diffusion: exact_ou requires a linear drift and constant diffusion");
        }
        const auto tr = ou_transition(*drift, sigma->s, x, dt);
        if (deterministic) {
            return tr.mean;
        }
        return tr.mean + std::sqrt(tr.variance) * noise.normal();
    }

    const double h = std::get<EulerMaruyama>(cfg.scheme).step;
    const auto substeps = static_cast<long long>(std::ceil(dt / h * (1.0 - 1e-12)));
    const long long n = substeps < 1 ? 1 : substeps;
    const double last = dt - static_cast<double>(n - 1) * h;
    for (long long k = 0; k < n; ++k) {
        const double step = k + 1 == n ? last : h;
        double next = x + drift_eval(coefficients.drift, x) * step;
        if (!deterministic) {
            next += sigma_eval(coefficients.diffusion, x) * std::sqrt(step) * noise.normal();
        }
        x = next;
    }
    return x;
}

double apply_x_jump(double x, const JumpMap& a) noexcept {
    return x + jump_eval(a, x);
}

} // namespace hjs
