#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ksense {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Copy of column j.
    std::vector<double> column(std::size_t j) const;

    double frobenius_norm() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Square matrix checked symmetric at construction:
/// |A(i,j) - A(j,i)| <= 1e-12 * max(1, |A(i,j)|), all entries finite.
class SymMatrix {
public:
    explicit SymMatrix(Matrix m);

    std::size_t order() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }
    double trace() const noexcept;

private:
    Matrix m_;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

/// y = A x
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
/// y = A^T x
std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x);

}  // namespace ksense
