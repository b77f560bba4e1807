#pragma once

#include "hjs/model.hpp"
#include "hjs/stability.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hjs {

/// x b(x) <= -d x^2 for |x| > r, plus 2 x a + a^2 <= 0 (condition 1) or
/// |a(x)| <= C |x|^eta with eta < 1 (condition 2).
struct ExponentialWitness {
    double d = 0.0;
    double r = 0.0;
    int condition = 1;
    double C = 0.0;
    double eta = 0.0;
};

/// x b(x) <= -gamma and |x + a(x)| <= |x| for |x| > r, with m chosen as the
/// midpoint of (2, 1 + 2 gamma / sigma1^2).
struct PolynomialWitness {
    double gamma = 0.0;
    double r = 0.0;
    double m = 0.0;
};

struct AssumptionReport {
    Frame frame = Frame::Neither;
    std::optional<ExponentialWitness> exponential;
    std::optional<PolynomialWitness> polynomial;
    /// Outermost grid point that rules out both frames.
    std::optional<double> violating_point;
    bool sigma_bounds_ok = false;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    bool stability_ok = false;
    double rho = 0.0;
    std::vector<std::size_t> degenerate_columns;
    std::vector<std::string> notes;
};

/// Classifies the model on the symmetric grid of `grid_points` points over
/// [-scan_radius, scan_radius]. Throws std::invalid_argument for a
/// nonpositive radius or fewer than two points.
AssumptionReport check_assumptions(const ModelSpec& model, double scan_radius,
                                   std::size_t grid_points);

} // namespace hjs
