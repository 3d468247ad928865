#pragma once

#include "ecc/matrix.hpp"

namespace ecc::kernels {

// Every kernel has a serial reference path and an OpenMP path. The parallel
// path assigns whole output rows to threads and keeps each element's
// accumulation order identical to the serial path, so results are bitwise
// equal for any thread count. Zero entries are skipped on the left operand;
// both paths share that logic.
enum class Exec { serial, parallel };

// C = A * B
Matrix multiply(const Matrix& a, const Matrix& b, Exec exec = Exec::parallel);

// C = A' * B
Matrix multiply_at_b(const Matrix& a, const Matrix& b, Exec exec = Exec::parallel);

// y = A * x
Vec multiply_vec(const Matrix& a, const Vec& x, Exec exec = Exec::parallel);

// y = A' * x
Vec multiply_tvec(const Matrix& a, const Vec& x, Exec exec = Exec::parallel);

Matrix transpose(const Matrix& a, Exec exec = Exec::parallel);

} // namespace ecc::kernels
