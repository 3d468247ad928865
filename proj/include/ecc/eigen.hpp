#pragma once

#include "ecc/matrix.hpp"

namespace ecc::eigen {

struct SymmetricEigen {
    Vec values;      // descending
    Matrix vectors;  // column j pairs with values[j]; orthonormal
    int sweeps = 0;
    double off_norm = 0.0; // final off-diagonal Frobenius norm
};

// Cyclic Jacobi for symmetric matrices. Deterministic rotation order, so
// identical input bytes give identical output bytes. Ties in the descending
// sort keep the solver's first-occurrence order (stable sort).
SymmetricEigen jacobi_symmetric(const Matrix& a, int max_sweeps = 64);

// Solve S * x = b for symmetric positive definite S via the spectral
// decomposition. Returns the reciprocal condition number lambda_min/lambda_max
// through rcond when non-null.
Vec spd_solve(const Matrix& s, const Vec& b, double* rcond = nullptr);

// Smallest and largest eigenvalue magnitudes of a symmetric matrix.
std::pair<double, double> symmetric_extremes(const Matrix& s);

} // namespace ecc::eigen
