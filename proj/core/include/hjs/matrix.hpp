#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hjs {

// Dense row-major matrix. Dimensions here are the number of Hawkes
// components, so everything stays small and cache resident.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix square(std::size_t n, double fill = 0.0) { return Matrix(n, n, fill); }
    static Matrix from_row_major(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    Matrix scaled(double s) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Sum of absolute values of all entries.
double l1_norm(const Matrix& m) noexcept;

std::vector<double> row_sums(const Matrix& m);
void row_sums(const Matrix& m, std::span<double> out) noexcept;

// Determinant by LU with partial pivoting.
double determinant(Matrix m);

bool all_finite(const Matrix& m) noexcept;

} // namespace hjs
