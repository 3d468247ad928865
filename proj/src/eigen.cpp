#include "ecc/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecc::eigen {

namespace {

double off_diagonal_norm(const Matrix& a) {
    const std::size_t n = a.rows();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
}

} // namespace

SymmetricEigen jacobi_symmetric(const Matrix& input, int max_sweeps) {
    const std::size_t n = input.rows();
    if (n != input.cols()) fail(errc::internal, "jacobi_symmetric: matrix not square");

    Matrix a = input;
    Matrix v = Matrix::identity(n);

    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    frob = std::sqrt(frob);
    const double stop = 1e-15 * std::max(frob, 1.0);

    SymmetricEigen out;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        out.sweeps = sweep;
        out.off_norm = off_diagonal_norm(a);
        if (out.off_norm <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

Vec spd_solve(const Matrix& s, const Vec& b, double* rcond) {
    const std::size_t n = s.rows();
    const SymmetricEigen eig = jacobi_symmetric(s);
    const double lo = eig.values.back(), hi = eig.values.front();
    if (rcond) *rcond = hi > 0.0 ? lo / hi : 0.0;
    if (lo <= 0.0) fail(errc::collinear, "spd_solve: matrix not positive definite");
    Vec x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += eig.vectors(i, j) * b[i];
        proj /= eig.values[j];
        for (std::size_t i = 0; i < n; ++i) x[i] += eig.vectors(i, j) * proj;
    }
    return x;
}

std::pair<double, double> symmetric_extremes(const Matrix& s) {
    const SymmetricEigen eig = jacobi_symmetric(s);
    double lo = std::abs(eig.values[0]), hi = lo;
    for (double v : eig.values) {
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    return {lo, hi};
}

} // namespace ecc::eigen
