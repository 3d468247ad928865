#include "ecc/kernels.hpp"

#include <cstdint>

namespace ecc::kernels {

namespace {

// Accumulate C(i,:) += a * B(k,:) for every nonzero A-entry feeding row i.
// Shared by both exec paths so the per-element operation sequence is fixed.
inline void axpy_row(double a, const double* b, double* c, std::size_t n) {
    if (a == 0.0) return;
    for (std::size_t j = 0; j < n; ++j) c[j] += a * b[j];
}

} // namespace

Matrix multiply(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.cols() != b.rows()) fail(errc::internal, "multiply: dimension mismatch");
    const std::size_t n = a.rows(), m = a.cols(), q = b.cols();
    Matrix c(n, q);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
            for (std::size_t k = 0; k < m; ++k)
                axpy_row(a(static_cast<std::size_t>(i), k), b.row_ptr(k),
                         c.row_ptr(static_cast<std::size_t>(i)), q);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                axpy_row(a(i, k), b.row_ptr(k), c.row_ptr(i), q);
    }
    return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.rows() != b.rows()) fail(errc::internal, "multiply_at_b: dimension mismatch");
    const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
    Matrix c(p, q);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(p); ++i)
            for (std::size_t k = 0; k < n; ++k)
                axpy_row(a(k, static_cast<std::size_t>(i)), b.row_ptr(k),
                         c.row_ptr(static_cast<std::size_t>(i)), q);
    } else {
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t k = 0; k < n; ++k)
                axpy_row(a(k, i), b.row_ptr(k), c.row_ptr(i), q);
    }
    return c;
}

Vec multiply_vec(const Matrix& a, const Vec& x, Exec exec) {
    if (a.cols() != x.size()) fail(errc::internal, "multiply_vec: dimension mismatch");
    const std::size_t n = a.rows(), m = a.cols();
    Vec y(n, 0.0);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const double* row = a.row_ptr(static_cast<std::size_t>(i));
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += row[k] * x[k];
            y[static_cast<std::size_t>(i)] = acc;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = a.row_ptr(i);
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += row[k] * x[k];
            y[i] = acc;
        }
    }
    return y;
}

Vec multiply_tvec(const Matrix& a, const Vec& x, Exec exec) {
    if (a.rows() != x.size()) fail(errc::internal, "multiply_tvec: dimension mismatch");
    const std::size_t n = a.rows(), m = a.cols();
    Vec y(m, 0.0);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < static_cast<std::int64_t>(m); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += a(k, static_cast<std::size_t>(j)) * x[k];
            y[static_cast<std::size_t>(j)] = acc;
        }
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += a(k, j) * x[k];
            y[j] = acc;
        }
    }
    return y;
}

Matrix transpose(const Matrix& a, Exec exec) {
    const std::size_t n = a.rows(), m = a.cols();
    Matrix t(m, n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
            for (std::size_t j = 0; j < m; ++j) t(j, static_cast<std::size_t>(i)) = a(static_cast<std::size_t>(i), j);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) t(j, i) = a(i, j);
    }
    return t;
}

} // namespace ecc::kernels
