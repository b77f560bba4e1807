#include "hjs/assumptions.hpp"

#include "hjs/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjs {

namespace {

constexpr double kRelTol = 1e-12;

struct PowerBound {
    double C;
    double eta;
};

// Condition 2 holds for the whole family or not at all.
std::optional<PowerBound> family_power_bound(const JumpMap& a) {
    if (const auto* c = std::get_if<ConstantJump>(&a)) {
        return PowerBound{std::abs(c->value), 0.0};
    }
    if (const auto* p = std::get_if<PowerBounded>(&a)) {
        return PowerBound{std::abs(p->scale), p->eta};
    }
    return std::nullopt;
}

// Smallest r such that `ok` holds at every grid point with |x| > r; nullopt
// when the outermost points fail. Also returns the worst failing |x|.
struct RadiusSearch {
    std::optional<double> r;
    double outermost_violation = 0.0;
};

template <class Predicate>
RadiusSearch find_radius(const std::vector<double>& grid, double radius, Predicate ok) {
    double worst = -1.0;
    double smallest_positive = std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const double ax = std::abs(x);
        if (ax == 0.0) {
            continue;
        }
        smallest_positive = std::min(smallest_positive, ax);
        if (!ok(x)) {
            worst = std::max(worst, ax);
        }
    }
    RadiusSearch out;
    if (worst < 0.0) {
        out.r = smallest_positive;
        return out;
    }
    out.outermost_violation = worst;
    if (worst < radius * (1.0 - kRelTol)) {
        out.r = worst;
    }
    return out;
}

} // namespace

AssumptionReport check_assumptions(const ModelSpec& model, double scan_radius,
                                   std::size_t grid_points) {
    if (!(scan_radius > 0.0) || !std::isfinite(scan_radius)) {
        throw std::invalid_argument("check_assumptions: scan_radius must be finite and > 0");
    }
    if (grid_points < 2) {
        throw std::invalid_argument("check_assumptions: need at least two grid points");
    }

    const auto& coeff = model.coefficients;
    std::vector<double> grid(grid_points);
    for (std::size_t k = 0; k < grid_points; ++k) {
        grid[k] = -scan_radius + 2.0 * scan_radius * static_cast<double>(k) /
                                     static_cast<double>(grid_points - 1);
    }

    AssumptionReport report;
    const auto bounds = sigma_squared_bounds(coeff.diffusion);
    report.sigma0 = bounds.lower;
    report.sigma1 = bounds.upper;
    report.sigma_bounds_ok = bounds.lower > 0.0 && std::isfinite(bounds.upper);
    report.degenerate_columns = degenerate_columns(model.kernel);
    report.notes.push_back(
        "growth exponent q of the second-derivative bound is recorded only, never evaluated");

    // Exponential frame; d = 0 is not accepted.
    const auto power = family_power_bound(coeff.jump);
    auto b_at = [&](double x) { return drift_eval(coeff.drift, x); };
    auto a_at = [&](double x) { return jump_eval(coeff.jump, x); };
    auto cond1 = [&](double x) {
        const double a = a_at(x);
        return 2.0 * x * a + a * a <= kRelTol * x * x;
    };
    const auto expo = find_radius(grid, scan_radius, [&](double x) {
        return x * b_at(x) < 0.0 && (power.has_value() || cond1(x));
    });
    if (expo.r) {
        ExponentialWitness w;
        w.r = *expo.r;
        w.d = std::numeric_limits<double>::infinity();
        bool all_cond1 = true;
        for (double x : grid) {
            if (std::abs(x) > w.r) {
                w.d = std::min(w.d, -b_at(x) / x);
                all_cond1 = all_cond1 && cond1(x);
            }
        }
        w.condition = all_cond1 ? 1 : 2;
        if (power) {
            w.C = power->C;
            w.eta = power->eta;
        }
        report.exponential = w;
    }

    // Polynomial frame: gamma must exceed sigma1 / 2 and make the exponent
    // interval (2, 1 + 2 gamma / sigma1^2) nonempty.
    const double s1 = report.sigma1;
    const double gamma_floor = std::max(s1 / 2.0, s1 * s1 / 2.0);
    const auto poly = find_radius(grid, scan_radius, [&](double x) {
        return -x * b_at(x) > gamma_floor &&
               std::abs(x + a_at(x)) <= std::abs(x) * (1.0 + kRelTol);
    });
    if (poly.r) {
        PolynomialWitness w;
        w.r = *poly.r;
        w.gamma = std::numeric_limits<double>::infinity();
        for (double x : grid) {
            if (std::abs(x) > w.r) {
                w.gamma = std::min(w.gamma, -x * b_at(x));
            }
        }
        const double upper = s1 > 0.0 ? 1.0 + 2.0 * w.gamma / (s1 * s1) : 4.0;
        w.m = 0.5 * (2.0 + upper);
        report.polynomial = w;
    }

    if (report.exponential) {
        report.frame = Frame::Exponential;
    } else if (report.polynomial) {
        report.frame = Frame::Polynomial;
    } else {
        report.frame = Frame::Neither;
        report.violating_point = std::max(expo.outermost_violation, poly.outermost_violation);
    }

    if (model.dimension() == 0) {
        report.stability_ok = true;
    } else {
        try {
            report.rho = spectral_radius(build_H(model));
            report.stability_ok = report.rho < 1.0;
        } catch (const ConvergenceError& e) {
            report.stability_ok = false;
            report.notes.push_back(e.what());
        }
    }
    if (!report.sigma_bounds_ok) {
        report.notes.push_back("sigma^2 is not bounded away from zero");
    }
    if (!report.degenerate_columns.empty()) {
        report.notes.push_back("degenerate kernel: repeated alpha or zero c in some column");
    }
    return report;
}

} // namespace hjs
