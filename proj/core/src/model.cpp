#include "hjs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string index2(const std::string& base, std::size_t i, std::size_t j) {
    return base + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

void require(bool ok, const std::string& field, const char* message) {
    if (!ok) {
        throw ValidationError(field, message);
    }
}

void require_finite(double v, const std::string& field) {
    require(std::isfinite(v), field, "must be finite");
}

} // namespace

double rate_eval(const RateFunction& f, double u) noexcept {
    return std::visit(
        overloaded{
            [u](const AffineClipped& r) { return std::max(r.floor, r.intercept + r.slope * u); },
            [u](const Sigmoid& r) {
                const double z = r.steepness * (u - r.center);
                double value;
                if (z >= 0.0) {
                    value = r.max_rate / (1.0 + std::exp(-z));
                } else {
                    const double e = std::exp(z);
                    value = r.max_rate * e / (1.0 + e);
                }
                return std::max(value, std::numeric_limits<double>::min());
            },
            [](const ConstantRate& r) { return r.level; },
        },
        f);
}

double lipschitz_constant(const RateFunction& f) noexcept {
    return std::visit(
        overloaded{
            [](const AffineClipped& r) { return std::abs(r.slope); },
            // L k s(1-s) peaks at s = 1/2.
            [](const Sigmoid& r) { return r.max_rate * r.steepness / 4.0; },
            [](const ConstantRate&) { return 0.0; },
        },
        f);
}

bool is_nondecreasing(const RateFunction& f) noexcept {
    return std::visit(overloaded{
                          [](const AffineClipped& r) { return r.slope >= 0.0; },
                          [](const Sigmoid&) { return true; },
                          [](const ConstantRate&) { return true; },
                      },
                      f);
}

std::vector<std::size_t> degenerate_columns(const KernelMatrix& kernel) {
    std::vector<std::size_t> out;
    const std::size_t m = kernel.dimension();
    for (std::size_t j = 0; j < m; ++j) {
        bool degenerate = false;
        for (std::size_t i = 0; i < m && !degenerate; ++i) {
            if (kernel.c(i, j) == 0.0) {
                degenerate = true;
            }
            for (std::size_t k = i + 1; k < m && !degenerate; ++k) {
                if (kernel.alpha(i, j) == kernel.alpha(k, j)) {
                    degenerate = true;
                }
            }
        }
        if (degenerate) {
            out.push_back(j);
        }
    }
    return out;
}

double drift_eval(const DriftSpec& b, double x) noexcept {
    return std::visit(overloaded{
                          [x](const LinearDrift& d) { return -d.beta * x + d.offset; },
                          [x](const BoundedSmoothDrift& d) {
                              return d.offset - d.amplitude * std::tanh(x / d.scale);
                          },
                      },
                      b);
}

double drift_lipschitz(const DriftSpec& b) noexcept {
    return std::visit(overloaded{
                          [](const LinearDrift& d) { return std::abs(d.beta); },
                          [](const BoundedSmoothDrift& d) { return d.amplitude / d.scale; },
                      },
                      b);
}

double sigma_eval(const DiffusionSpec& s, double x) noexcept {
    return std::visit(overloaded{
                          [](const ConstantDiffusion& d) { return d.s; },
                          [x](const SmoothBoundedDiffusion& d) {
                              const double x2 = x * x;
                              return d.s0 + (d.s1 - d.s0) * x2 / (1.0 + x2);
                          },
                      },
                      s);
}

bool is_degenerate(const DiffusionSpec& s) noexcept {
    const auto* c = std::get_if<ConstantDiffusion>(&s);
    return c != nullptr && c->s == 0.0;
}

SigmaSquaredBounds sigma_squared_bounds(const DiffusionSpec& s) noexcept {
    return std::visit(overloaded{
                          [](const ConstantDiffusion& d) {
                              return SigmaSquaredBounds{d.s * d.s, d.s * d.s};
                          },
                          [](const SmoothBoundedDiffusion& d) {
                              return SigmaSquaredBounds{d.s0 * d.s0, d.s1 * d.s1};
                          },
                      },
                      s);
}

double jump_eval(const JumpMap& a, double x) noexcept {
    return std::visit(overloaded{
                          [](const ConstantJump& j) { return j.value; },
                          [x](const LinearDamping& j) { return -j.eta * x; },
                          [x](const PowerBounded& j) {
                              return j.scale * x * std::pow(1.0 + std::abs(x), j.eta - 1.0);
                          },
                      },
                      a);
}

void validate(const RateFunction& f, const std::string& field) {
    std::visit(overloaded{
                   [&](const AffineClipped& r) {
                       require_finite(r.intercept, field + ".intercept");
                       require_finite(r.slope, field + ".slope");
                       require(std::isfinite(r.floor) && r.floor > 0.0, field + ".floor",
                               "must be finite and > 0");
                   },
                   [&](const Sigmoid& r) {
                       require(std::isfinite(r.max_rate) && r.max_rate > 0.0, field + ".max",
                               "must be finite and > 0");
                       require(std::isfinite(r.steepness) && r.steepness > 0.0,
                               field + ".steepness", "must be finite and > 0");
                       require_finite(r.center, field + ".center");
                   },
                   [&](const ConstantRate& r) {
                       require(std::isfinite(r.level) && r.level > 0.0, field + ".level",
                               "must be finite and > 0");
                   },
               },
               f);
}

void validate(const ModelSpec& model) {
    const std::size_t m = model.dimension();
    for (std::size_t i = 0; i < m; ++i) {
        validate(model.rates[i], "rates[" + std::to_string(i) + "]");
    }

    const auto& k = model.kernel;
    require(k.c.rows() == m && k.c.cols() == m, "kernel.c", "must be M x M");
    require(k.alpha.rows() == m && k.alpha.cols() == m, "kernel.alpha", "must be M x M");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            require_finite(k.c(i, j), index2("kernel.c", i, j));
            require(std::isfinite(k.alpha(i, j)) && k.alpha(i, j) > 0.0,
                    index2("kernel.alpha", i, j), "must be finite and > 0");
        }
    }

    const auto& coeff = model.coefficients;
    std::visit(overloaded{
                   [](const LinearDrift& d) {
                       require_finite(d.beta, "coefficients.drift.beta");
                       require_finite(d.offset, "coefficients.drift.offset");
                   },
                   [](const BoundedSmoothDrift& d) {
                       require(std::isfinite(d.amplitude) && d.amplitude >= 0.0,
                               "coefficients.drift.amplitude", "must be finite and >= 0");
                       require(std::isfinite(d.scale) && d.scale > 0.0, "coefficients.drift.scale",
                               "must be finite and > 0");
                       require_finite(d.offset, "coefficients.drift.offset");
                   },
               },
               coeff.drift);
    std::visit(overloaded{
                   [](const ConstantDiffusion& d) {
                       require(std::isfinite(d.s) && d.s >= 0.0, "coefficients.diffusion.s",
                               "must be finite and >= 0");
                   },
                   [](const SmoothBoundedDiffusion& d) {
                       require(std::isfinite(d.s0) && d.s0 > 0.0, "coefficients.diffusion.s0",
                               "must be finite and > 0");
                       require(std::isfinite(d.s1) && d.s1 >= d.s0, "coefficients.diffusion.s1",
                               "must be finite and >= s0");
                   },
               },
               coeff.diffusion);
    std::visit(overloaded{
                   [](const ConstantJump& j) { require_finite(j.value, "coefficients.jump.value"); },
                   [](const LinearDamping& j) {
                       require(j.eta >= 0.0 && j.eta <= 2.0, "coefficients.jump.eta",
                               "must lie in [0, 2]");
                   },
                   [](const PowerBounded& j) {
                       require_finite(j.scale, "coefficients.jump.C");
                       require(std::isfinite(j.eta) && j.eta < 1.0, "coefficients.jump.eta",
                               "must be finite and < 1");
                   },
               },
               coeff.jump);

    require_finite(model.initial.x, "initial.x");
    require(model.initial.y.rows() == m && model.initial.y.cols() == m, "initial.y",
            "must be M x M");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            require_finite(model.initial.y(i, j), index2("initial.y", i, j));
        }
    }
}

} // namespace hjs
