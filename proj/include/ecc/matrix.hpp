#pragma once

#include <cstddef>
#include <vector>

#include "ecc/error.hpp"

namespace ecc {

using Vec = std::vector<double>;

// Dense row-major matrix. Value type, no views; sized for the scales this
// library works at (products x countries, a few thousand x a few hundred).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    double* row_ptr(std::size_t i) noexcept { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const noexcept { return data_.data() + i * cols_; }

    Vec col(std::size_t j) const {
        Vec out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }
    void set_col(std::size_t j, const Vec& v) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    const Vec& data() const noexcept { return data_; }
    Vec& data() noexcept { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

} // namespace ecc
