#include "hjs/intensity.hpp"

#include <cmath>
#include <stdexcept>

namespace hjs {

Matrix flow_y(const KernelMatrix& kernel, const Matrix& y, double t) {
    Matrix out;
    flow_y_into(kernel, y, t, out);
    return out;
}

void flow_y_into(const KernelMatrix& kernel, const Matrix& y, double t, Matrix& out) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("flow_y: time must be nonnegative");
    }
    if (out.rows() != y.rows() || out.cols() != y.cols()) {
        out = Matrix(y.rows(), y.cols());
    }
    const auto alpha = kernel.alpha.values();
    const auto src = y.values();
    auto dst = out.values();
    if (t == 0.0) {
        std::copy(src.begin(), src.end(), dst.begin());
        return;
    }
    for (std::size_t k = 0; k < src.size(); ++k) {
        dst[k] = src[k] == 0.0 ? 0.0 : std::exp(-alpha[k] * t) * src[k];
    }
}

Matrix apply_jump(const KernelMatrix& kernel, const Matrix& y, std::size_t j) {
    Matrix out = y;
    apply_jump_inplace(kernel, out, j);
    return out;
}

void apply_jump_inplace(const KernelMatrix& kernel, Matrix& y, std::size_t j) {
    if (j >= y.cols()) {
        throw std::out_of_range("apply_jump: component index out of range");
    }
    for (std::size_t i = 0; i < y.rows(); ++i) {
        y(i, j) += kernel.c(i, j);
    }
}

IntensityVector intensities(const ModelSpec& model, const Matrix& y) {
    IntensityVector out(model.dimension());
    intensities_into(model, y, out);
    return out;
}

void intensities_into(const ModelSpec& model, const Matrix& y, std::span<double> out) noexcept {
    for (std::size_t i = 0; i < model.dimension(); ++i) {
        double s = 0.0;
        for (double v : y.row(i)) {
            s += v;
        }
        out[i] = rate_eval(model.rates[i], s);
    }
}

double total_rate(const ModelSpec& model, const Matrix& y) noexcept {
    double total = 0.0;
    for (std::size_t i = 0; i < model.dimension(); ++i) {
        double s = 0.0;
        for (double v : y.row(i)) {
            s += v;
        }
        total += rate_eval(model.rates[i], s);
    }
    return total;
}

double dominating_bound(const ModelSpec& model, const Matrix& y) noexcept {
    double bound = 0.0;
    for (std::size_t i = 0; i < model.dimension(); ++i) {
        double abs_sum = 0.0;
        for (double v : y.row(i)) {
            abs_sum += std::abs(v);
        }
        const auto& f = model.rates[i];
        bound += rate_eval(f, 0.0) + lipschitz_constant(f) * abs_sum;
    }
    return bound;
}

std::optional<double> refined_bound(const ModelSpec& model, const Matrix& y) noexcept {
    double bound = 0.0;
    for (std::size_t i = 0; i < model.dimension(); ++i) {
        const auto& f = model.rates[i];
        if (!is_nondecreasing(f)) {
            return std::nullopt;
        }
        double positive = 0.0;
        for (double v : y.row(i)) {
            positive += v > 0.0 ? v : 0.0;
        }
        bound += rate_eval(f, positive);
    }
    return bound;
}

} // namespace hjs
