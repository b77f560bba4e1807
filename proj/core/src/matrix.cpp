#include "hjs/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hjs {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw std::invalid_argument("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (values.size() != rows * cols) {
        throw std::invalid_argument("Matrix: row-major data has wrong length");
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(values);
    return m;
}

Matrix Matrix::scaled(double s) const {
    Matrix out = *this;
    for (double& v : out.data_) {
        v *= s;
    }
    return out;
}

double l1_norm(const Matrix& m) noexcept {
    double sum = 0.0;
    for (double v : m.values()) {
        sum += std::abs(v);
    }
    return sum;
}

std::vector<double> row_sums(const Matrix& m) {
    std::vector<double> out(m.rows());
    row_sums(m, out);
    return out;
}

void row_sums(const Matrix& m, std::span<double> out) noexcept {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double v : m.row(i)) {
            s += v;
        }
        out[i] = s;
    }
}

double determinant(Matrix m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("determinant: matrix is not square");
    }
    const std::size_t n = m.rows();
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > std::abs(m(pivot, k))) {
                pivot = i;
            }
        }
        if (m(pivot, k) == 0.0) {
            return 0.0;
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(k, j), m(pivot, j));
            }
            det = -det;
        }
        det *= m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) {
                m(i, j) -= factor * m(k, j);
            }
        }
    }
    return det;
}

bool all_finite(const Matrix& m) noexcept {
    for (double v : m.values()) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

} // namespace hjs
