#pragma once

#include "hjs/matrix.hpp"
#include "hjs/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hjs {

/// lambda_i = f_i(sum_j y_ij), one entry per component.
using IntensityVector = std::vector<double>;

/// Deterministic memory flow: entry (i, j) decays as exp(-alpha_ij t) y_ij.
/// Throws std::invalid_argument for negative t.
Matrix flow_y(const KernelMatrix& kernel, const Matrix& y, double t);
void flow_y_into(const KernelMatrix& kernel, const Matrix& y, double t, Matrix& out);

/// Adds column j of c to column j of y (component j fired).
Matrix apply_jump(const KernelMatrix& kernel, const Matrix& y, std::size_t j);
void apply_jump_inplace(const KernelMatrix& kernel, Matrix& y, std::size_t j);

IntensityVector intensities(const ModelSpec& model, const Matrix& y);
void intensities_into(const ModelSpec& model, const Matrix& y, std::span<double> out) noexcept;

double total_rate(const ModelSpec& model, const Matrix& y) noexcept;

/// Lipschitz envelope B(y) = sum_i [f_i(0) + gamma_i sum_j |y_ij|].
/// B is non-increasing along the flow and dominates total_rate until the
/// next jump.
double dominating_bound(const ModelSpec& model, const Matrix& y) noexcept;

/// sum_i f_i(sum_j max(y_ij, 0)). Valid along the flow only when every f_i
/// is nondecreasing; returns nullopt otherwise.
std::optional<double> refined_bound(const ModelSpec& model, const Matrix& y) noexcept;

} // namespace hjs
