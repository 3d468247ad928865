// Compares serial and OpenMP matrix kernels: wall time plus a bitwise
// equality check on every output. Sizes roughly match a full trade matrix.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "ecc/kernels.hpp"
#include "ecc/matrix.hpp"

using ecc::Matrix;
using namespace ecc::kernels;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double gate = unit(rng);
            const double value = unit(rng);
            a(i, j) = gate < density ? value : 0.0;
        }
    return a;
}

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n = 250;   // countries
    std::size_t m = 800;   // products
    int reps = 3;
    if (argc > 1) n = std::stoul(argv[1]);
    if (argc > 2) m = std::stoul(argv[2]);
    if (argc > 3) reps = std::stoi(argv[3]);

    const Matrix x = random_matrix(n, m, 0.3, 42);
    const Matrix xs = random_matrix(n, m, 0.3, 43);

    std::printf("kernel benchmark: n=%zu m=%zu reps=%d\n", n, m, reps);
    std::printf("%-16s %12s %12s %9s %9s\n", "kernel", "serial ms", "parallel ms", "speedup", "bitwise");

    struct Case {
        const char* name;
        Matrix serial_out, parallel_out;
        double serial_ms, parallel_ms;
    };

    Case cases[3];

    cases[0].name = "multiply_at_b";
    cases[0].serial_ms = time_ms([&] { cases[0].serial_out = multiply_at_b(x, xs, Exec::serial); }, reps);
    cases[0].parallel_ms = time_ms([&] { cases[0].parallel_out = multiply_at_b(x, xs, Exec::parallel); }, reps);

    const Matrix k = cases[0].serial_out; // m x m
    const Matrix xt = transpose(x, Exec::serial);

    cases[1].name = "multiply";
    cases[1].serial_ms = time_ms([&] { cases[1].serial_out = multiply(x, k, Exec::serial); }, reps);
    cases[1].parallel_ms = time_ms([&] { cases[1].parallel_out = multiply(x, k, Exec::parallel); }, reps);

    cases[2].name = "transpose";
    cases[2].serial_ms = time_ms([&] { cases[2].serial_out = transpose(k, Exec::serial); }, reps);
    cases[2].parallel_ms = time_ms([&] { cases[2].parallel_out = transpose(k, Exec::parallel); }, reps);

    bool all_equal = true;
    for (const Case& c : cases) {
        const bool eq = c.serial_out == c.parallel_out;
        all_equal = all_equal && eq;
        std::printf("%-16s %12.3f %12.3f %8.2fx %9s\n", c.name, c.serial_ms, c.parallel_ms,
                    c.serial_ms / (c.parallel_ms > 0 ? c.parallel_ms : 1e-9), eq ? "yes" : "NO");
    }

    // Vector kernels timed without the table (outputs too small to matter).
    ecc::Vec v(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) v[j] = 1.0 / double(j + 1);
    const ecc::Vec ys = multiply_vec(x, v, Exec::serial);
    const ecc::Vec yp = multiply_vec(x, v, Exec::parallel);
    const bool vec_eq = ys == yp;
    std::printf("%-16s %12s %12s %9s %9s\n", "multiply_vec", "-", "-", "-", vec_eq ? "yes" : "NO");

    if (!all_equal || !vec_eq) {
        std::printf("FAIL: serial and parallel kernels disagree\n");
        return 1;
    }
    return 0;
}
