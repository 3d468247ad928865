#include "ecc/cca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ecc/eigen.hpp"
#include "ecc/error.hpp"
#include "ecc/kernels.hpp"
#include "ecc/rng.hpp"
#include "ecc/stats.hpp"

namespace ecc {

namespace {

void subtract_weighted_mean(Vec& x, const Vec& w) {
    double mu = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mu += w[i] * x[i];
    for (double& v : x) v -= mu;
}

// Modified Gram-Schmidt in the W-inner product, constant vector deflated.
// Collapsed columns are replaced with fresh deterministic fill; returns how
// many columns needed replacement.
int w_orthonormalize(Matrix& q, const Vec& w, SplitMix64& rng) {
    const std::size_t m = q.rows(), b = q.cols();
    int replaced = 0;
    for (std::size_t j = 0; j < b; ++j) {
        for (int attempt = 0;; ++attempt) {
            Vec col = q.col(j);
            subtract_weighted_mean(col, w);
            for (std::size_t i = 0; i < j; ++i) {
                const Vec prev = q.col(i);
                const double coef = stats::weighted_dot(col, prev, w);
                for (std::size_t p = 0; p < m; ++p) col[p] -= coef * prev[p];
            }
            const double norm = std::sqrt(stats::weighted_dot(col, col, w));
            if (norm > 1e-12) {
                for (double& v : col) v /= norm;
                q.set_col(j, col);
                break;
            }
            if (attempt >= 8)
                fail(errc::degenerate, "cca_eigen: constrained subspace collapsed during orthogonalization");
            for (std::size_t p = 0; p < m; ++p) q(p, j) = rng.unit() - 0.5;
            ++replaced;
        }
    }
    return replaced;
}

double cooccurrence_trace(const SpecializationMatrix& sm) {
    const std::size_t n = sm.products.size(), m = sm.countries.size();
    double tr = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        double kpp = 0.0;
        for (std::size_t q = 0; q < n; ++q) kpp += sm.x(q, p) * sm.xu(q, p);
        tr += kpp / sm.diversity[p];
    }
    return tr;
}

void check_cca_arguments(const SpecializationMatrix& sm, const CountryVariableTable& env,
                         std::size_t num_axes, const char* who) {
    const std::size_t z = env.names.size();
    if (num_axes < 1 || num_axes > z)
        fail(errc::argument, std::string(who) + ": num_axes must be in [1, " + std::to_string(z) +
                                 "], got " + std::to_string(num_axes));
    if (env.y.rows() != sm.countries.size())
        fail(errc::internal, std::string(who) + ": environment not aligned to countries");
    const Components comps = bipartite_components(sm);
    if (comps.count > 1)
        fail(errc::disconnected, std::string(who) + ": specialization matrix is disconnected; " +
                                     describe_components(sm, comps));
}

// U = Xu E_std, V = Xd'U, B = TV, unit-norm E, inertia, sign and meta.
void assemble(CcaResult& out, Matrix e_std, Vec lambda, const SpecializationMatrix& sm,
              const CountryVariableTable& env, const EnvironmentOperator& op, SignConvention sign) {
    const std::size_t m = sm.countries.size();
    const std::size_t k = lambda.size();

    out.lambda = std::move(lambda);
    out.e_std = std::move(e_std);
    out.u = kernels::multiply(sm.xu, out.e_std);
    out.v = kernels::multiply_at_b(sm.xd, out.u);
    out.b = kernels::multiply(op.t, out.v);

    out.e = Matrix(m, k);
    for (std::size_t j = 0; j < k; ++j) {
        Vec col = out.e_std.col(j);
        const double norm = stats::norm2(col);
        for (double& v : col) v /= norm;
        out.e.set_col(j, col);
    }

    if (sign == SignConvention::standard) {
        const Vec y1 = env.y.col(0);
        for (std::size_t j = 0; j < k; ++j) {
            Vec vt = out.v.col(j);
            const double sd = stats::standardize_weighted(vt, sm.w);
            const double a = sd > 0.0 ? stats::weighted_dot(y1, vt, sm.w) : 0.0;
            bool flip = false;
            if (a < 0.0) {
                flip = true;
            } else if (a == 0.0) {
                Vec probe = out.e_std.col(j);
                flip = orient_largest_entry_positive(probe);
            }
            if (flip) {
                for (Matrix* mat : {&out.e, &out.e_std, &out.u, &out.v, &out.b})
                    for (std::size_t i = 0; i < mat->rows(); ++i) (*mat)(i, j) = -(*mat)(i, j);
            }
        }
    }

    out.trace = cooccurrence_trace(sm);
    if (out.trace <= 1.0 + 1e-12)
        fail(errc::degenerate, "cca: trace must exceed 1, got " + std::to_string(out.trace));
    out.inertia_shares.resize(k);
    for (std::size_t j = 0; j < k; ++j) out.inertia_shares[j] = out.lambda[j] / (out.trace - 1.0);

    for (std::size_t j = 0; j + 1 < k; ++j)
        if (std::abs(out.lambda[j] - out.lambda[j + 1]) <= 1e-12)
            out.method_meta.repeated_eigenvalues = true;
}

} // namespace

EnvironmentOperator regression_operator(const CountryVariableTable& env, const SpecializationMatrix& sm) {
    const std::size_t m = sm.countries.size();
    const std::size_t cols = env.y.cols(); // z + 1
    if (env.y.rows() != m)
        fail(errc::internal, "regression_operator: environment not aligned to countries");
    if (cols > m)
        fail(errc::argument, "regression_operator: more variables than countries");

    // G = Y'WY, computed entrywise so it is exactly symmetric.
    Matrix g(cols, cols);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < m; ++p) acc += sm.w[p] * env.y(p, i) * env.y(p, j);
            g(i, j) = acc;
        }

    const auto eig = eigen::jacobi_symmetric(g);
    const double hi = eig.values.front(), lo = eig.values.back();
    EnvironmentOperator out;
    out.smallest = lo;
    out.rcond = hi > 0.0 ? lo / hi : 0.0;
    if (lo <= 0.0 || out.rcond < 1e-12)
        fail(errc::collinear, "regression_operator: Y'WY is singular or ill-conditioned "
                              "(smallest singular value " + std::to_string(lo) + ")");

    Matrix ginv(cols, cols);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < cols; ++r)
                acc += eig.vectors(i, r) * eig.vectors(j, r) / eig.values[r];
            ginv(i, j) = acc;
        }

    Matrix ytw(cols, m);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t p = 0; p < m; ++p) ytw(i, p) = env.y(p, i) * sm.w[p];
    out.t = kernels::multiply(ginv, ytw);
    return out;
}

CcaResult cca_eigen(const SpecializationMatrix& sm, const CountryVariableTable& env,
                    std::size_t num_axes, SignConvention sign) {
    check_cca_arguments(sm, env, num_axes, "cca_eigen");
    const std::size_t m = sm.countries.size();
    const std::size_t z = env.names.size();

    const EnvironmentOperator op = regression_operator(env, sm);
    const Matrix c = cooccurrence_country(sm);

    // One application of H C^c H with the constant deflated per column.
    const auto apply_op = [&](const Matrix& q) {
        Matrix hq = kernels::multiply(env.y, kernels::multiply(op.t, q));
        Matrix chq = kernels::multiply(c, hq);
        Matrix out = kernels::multiply(env.y, kernels::multiply(op.t, chq));
        for (std::size_t j = 0; j < out.cols(); ++j) {
            Vec col = out.col(j);
            subtract_weighted_mean(col, sm.w);
            out.set_col(j, col);
        }
        return out;
    };

    const std::size_t block = z;
    SplitMix64 rng(0x00c0ffee5eed1234ull);
    Matrix q(m, block);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t j = 0; j < block; ++j) q(p, j) = rng.unit() - 0.5;
    w_orthonormalize(q, sm.w, rng);

    const double tol = 1e-11;
    const int max_sweeps = 1000;
    Vec theta(block, 0.0);
    double max_res = 0.0;
    bool converged = false;
    int sweeps = 0;

    for (sweeps = 1; sweeps <= max_sweeps && !converged; ++sweeps) {
        Matrix zb = apply_op(q);
        w_orthonormalize(zb, sm.w, rng);
        const Matrix azb = apply_op(zb);

        // Rayleigh-Ritz: G should be symmetric because H C^c H is
        // W-self-adjoint; measurable asymmetry means a complex pair.
        Matrix g(block, block);
        for (std::size_t i = 0; i < block; ++i)
            for (std::size_t j = 0; j < block; ++j) {
                double acc = 0.0;
                for (std::size_t p = 0; p < m; ++p) acc += zb(p, i) * sm.w[p] * azb(p, j);
                g(i, j) = acc;
            }
        double gnorm = 0.0, asym = 0.0;
        for (std::size_t i = 0; i < block; ++i)
            for (std::size_t j = 0; j < block; ++j) {
                gnorm += g(i, j) * g(i, j);
                const double d = g(i, j) - g(j, i);
                asym += d * d;
            }
        if (std::sqrt(asym) > 1e-8 * std::max(std::sqrt(gnorm), 1.0))
            fail(errc::numerical, "cca_eigen: projected operator asymmetric beyond tolerance; "
                                  "complex eigenvalues suspected");
        for (std::size_t i = 0; i < block; ++i)
            for (std::size_t j = i + 1; j < block; ++j) {
                const double s = 0.5 * (g(i, j) + g(j, i));
                g(i, j) = s;
                g(j, i) = s;
            }

        const auto ritz = eigen::jacobi_symmetric(g);
        const Matrix qnew = kernels::multiply(zb, ritz.vectors);
        const Matrix aqnew = kernels::multiply(azb, ritz.vectors);
        theta = ritz.values;

        max_res = 0.0;
        for (std::size_t j = 0; j < num_axes; ++j) {
            double r2 = 0.0;
            for (std::size_t p = 0; p < m; ++p) {
                const double r = aqnew(p, j) - theta[j] * qnew(p, j);
                r2 += sm.w[p] * r * r;
            }
            max_res = std::max(max_res, std::sqrt(r2) / std::max(1.0, std::abs(theta[j])));
        }
        q = qnew;
        converged = max_res < tol;
    }
    if (!converged)
        fail(errc::convergence, "cca_eigen: subspace iteration did not converge in " +
                                    std::to_string(max_sweeps) + " sweeps (residual " +
                                    std::to_string(max_res) + ")");

    Matrix e_std(m, num_axes);
    Vec lambda(num_axes);
    for (std::size_t j = 0; j < num_axes; ++j) {
        if (theta[j] <= 1e-14)
            fail(errc::degenerate, "cca_eigen: axis " + std::to_string(j + 1) +
                                       " has zero canonical eigenvalue; the environment supports fewer axes");
        lambda[j] = theta[j];
        Vec col = q.col(j);
        stats::standardize_weighted(col, sm.w); // exact W-variance 1
        e_std.set_col(j, col);
    }

    CcaResult out;
    out.method_meta.solver = "subspace";
    out.method_meta.iterations = sweeps - 1;
    out.method_meta.residual = max_res;
    assemble(out, std::move(e_std), std::move(lambda), sm, env, op, sign);
    return out;
}

CcaResult cca_iterative(const SpecializationMatrix& sm, const CountryVariableTable& env,
                        std::size_t num_axes, double tol, int max_iter, SignConvention sign) {
    if (!(tol > 0.0)) fail(errc::argument, "cca_iterative: tol must be positive");
    if (max_iter < 1) fail(errc::argument, "cca_iterative: max_iter must be at least 1");
    check_cca_arguments(sm, env, num_axes, "cca_iterative");
    const std::size_t m = sm.countries.size();

    const EnvironmentOperator op = regression_operator(env, sm);

    // Arbitrary but distinct start: the country index ramp, standardized.
    Vec ramp(m);
    for (std::size_t p = 0; p < m; ++p) ramp[p] = static_cast<double>(p);
    stats::standardize_weighted(ramp, sm.w);

    Matrix e_std(m, num_axes);
    Vec lambda(num_axes);
    std::vector<Vec> settled;
    int total_iterations = 0;
    double last_residual = 0.0;

    for (std::size_t axis = 0; axis < num_axes; ++axis) {
        Vec v = ramp;
        bool converged = false;
        double scale = 0.0;
        for (int it = 1; it <= max_iter; ++it) {
            const Vec u = kernels::multiply_vec(sm.xu, v);        // product scores
            const Vec vt = kernels::multiply_tvec(sm.xd, u);      // country scores
            Vec e = kernels::multiply_vec(env.y, kernels::multiply_vec(op.t, vt)); // fitted
            for (const Vec& prev : settled) {
                const double coef = stats::weighted_dot(e, prev, sm.w);
                for (std::size_t p = 0; p < m; ++p) e[p] -= coef * prev[p];
            }
            scale = stats::standardize_weighted(e, sm.w);
            if (scale == 0.0)
                fail(errc::numerical, "cca_iterative: axis " + std::to_string(axis + 1) +
                                          " collapsed to a constant");
            if (stats::weighted_dot(e, v, sm.w) < 0.0)
                for (double& x : e) x = -x;
            last_residual = stats::max_abs_diff(e, v);
            v = std::move(e);
            ++total_iterations;
            if (last_residual < tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            fail(errc::convergence, "cca_iterative: axis " + std::to_string(axis + 1) +
                                        " did not converge in " + std::to_string(max_iter) +
                                        " iterations (residual " + std::to_string(last_residual) + ")");
        settled.push_back(v);
        e_std.set_col(axis, v);
        lambda[axis] = scale;
    }

    CcaResult out;
    out.method_meta.solver = "ter_braak";
    out.method_meta.iterations = total_iterations;
    out.method_meta.residual = last_residual;
    assemble(out, std::move(e_std), std::move(lambda), sm, env, op, sign);
    return out;
}

namespace {

AxisResiduals axis_residuals(const Vec& d, const Vec& s, const Vec& w, const Vec& e_col,
                             const Vec& u_col, const Vec& v_col) {
    AxisResiduals r;
    r.dv_abs = std::abs(stats::dot(d, v_col));
    r.dv_rel = r.dv_abs / std::max(stats::norm2(d) * stats::norm2(v_col), 1e-300);
    r.su_abs = std::abs(stats::dot(s, u_col));
    r.su_rel = r.su_abs / std::max(stats::norm2(s) * stats::norm2(u_col), 1e-300);
    r.wnorm = std::abs(stats::weighted_dot(e_col, e_col, w) - 1.0);
    r.de_rel = std::abs(stats::dot(d, e_col)) / std::max(stats::norm2(d) * stats::norm2(e_col), 1e-300);
    return r;
}

} // namespace

OrthogonalityReport validate_ordination(const CaResult& result, const SpecializationMatrix& sm) {
    OrthogonalityReport report;
    const Matrix v = kernels::multiply_at_b(sm.xd, result.product_axes);
    for (std::size_t j = 0; j < result.eigenvalues.size(); ++j) {
        AxisResiduals r = axis_residuals(sm.diversity, sm.ubiquity, sm.w, result.country_axes.col(j),
                                         result.product_axes.col(j), v.col(j));
        r.span_rel = 0.0; // no constraining span in plain CA
        report.pass = report.pass && r.dv_rel <= report.rel_tolerance &&
                      r.su_rel <= report.rel_tolerance && r.de_rel <= report.rel_tolerance &&
                      r.wnorm <= report.norm_tolerance;
        report.axes.push_back(r);
    }
    return report;
}

OrthogonalityReport validate_ordination(const CcaResult& result, const SpecializationMatrix& sm,
                                        const CountryVariableTable& env) {
    OrthogonalityReport report;
    const EnvironmentOperator op = regression_operator(env, sm);
    for (std::size_t j = 0; j < result.lambda.size(); ++j) {
        const Vec e_col = result.e_std.col(j);
        AxisResiduals r = axis_residuals(sm.diversity, sm.ubiquity, sm.w, e_col, result.u.col(j),
                                         result.v.col(j));
        const Vec he = kernels::multiply_vec(env.y, kernels::multiply_vec(op.t, e_col));
        double diff2 = 0.0;
        for (std::size_t p = 0; p < e_col.size(); ++p) {
            const double d = he[p] - e_col[p];
            diff2 += d * d;
        }
        r.span_rel = std::sqrt(diff2) / std::max(stats::norm2(e_col), 1e-300);
        report.pass = report.pass && r.dv_rel <= report.rel_tolerance &&
                      r.su_rel <= report.rel_tolerance && r.de_rel <= report.rel_tolerance &&
                      r.wnorm <= report.norm_tolerance && r.span_rel <= report.rel_tolerance;
        report.axes.push_back(r);
    }
    return report;
}

} // namespace ecc
