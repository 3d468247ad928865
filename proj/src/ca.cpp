#include "ecc/ca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecc/eigen.hpp"
#include "ecc/error.hpp"
#include "ecc/kernels.hpp"
#include "ecc/stats.hpp"

namespace ecc {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

void unite(std::vector<std::size_t>& parent, std::size_t a, std::size_t b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

} // namespace

bool orient_largest_entry_positive(Vec& axis) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (std::abs(axis[i]) > std::abs(axis[arg])) arg = i;
    if (axis[arg] < 0.0) {
        for (double& v : axis) v = -v;
        return true;
    }
    return false;
}

bool orient_by_correlation(Vec& axis, const Vec& ref) {
    const double c = stats::pearson(axis, ref);
    if (c < 0.0) {
        for (double& v : axis) v = -v;
        return true;
    }
    if (c == 0.0) return orient_largest_entry_positive(axis);
    return false;
}

Matrix cooccurrence_country(const SpecializationMatrix& sm) {
    return kernels::multiply_at_b(sm.xd, sm.xu);
}

ReflectionsTrace method_of_reflections(const SpecializationMatrix& sm, int k) {
    if (k < 0) fail(errc::argument, "method_of_reflections: negative iteration count");
    ReflectionsTrace trace;
    trace.country.push_back(sm.diversity);
    trace.product.push_back(sm.ubiquity);
    for (int i = 0; i < k; ++i) {
        // Both indicators advance from iteration i together.
        trace.country.push_back(kernels::multiply_tvec(sm.xd, trace.product[i]));
        trace.product.push_back(kernels::multiply_vec(sm.xu, trace.country[i]));
    }
    return trace;
}

Components bipartite_components(const SpecializationMatrix& sm) {
    const std::size_t n = sm.x.rows(), m = sm.x.cols();
    std::vector<std::size_t> parent(n + m);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p)
            if (sm.x(q, p) != 0.0) unite(parent, q, n + p);

    Components out;
    out.product_component.assign(n, -1);
    out.country_component.assign(m, -1);
    std::vector<std::size_t> root_to_id(n + m, SIZE_MAX);
    for (std::size_t i = 0; i < n + m; ++i) {
        const std::size_t root = find_root(parent, i);
        if (root_to_id[root] == SIZE_MAX) root_to_id[root] = out.count++;
        const int id = static_cast<int>(root_to_id[root]);
        if (i < n)
            out.product_component[i] = id;
        else
            out.country_component[i - n] = id;
    }
    return out;
}

std::string describe_components(const SpecializationMatrix& sm, const Components& comps) {
    std::string msg;
    for (std::size_t c = 0; c < comps.count; ++c) {
        std::size_t products = 0, countries = 0;
        std::string sample;
        std::size_t listed = 0;
        for (std::size_t q = 0; q < comps.product_component.size(); ++q)
            if (comps.product_component[q] == static_cast<int>(c)) ++products;
        for (std::size_t p = 0; p < comps.country_component.size(); ++p)
            if (comps.country_component[p] == static_cast<int>(c)) {
                ++countries;
                if (listed < 5) {
                    if (!sample.empty()) sample += " ";
                    sample += sm.countries[p];
                    ++listed;
                }
            }
        if (countries > listed) sample += " and " + std::to_string(countries - listed) + " more";
        if (!msg.empty()) msg += "; ";
        msg += "component " + std::to_string(c + 1) + ": " + std::to_string(products) + " products, " +
               std::to_string(countries) + " countries (" + sample + ")";
    }
    return msg;
}

SpecializationMatrix restrict_to_largest_component(const SpecializationMatrix& sm) {
    const Components comps = bipartite_components(sm);
    if (comps.count <= 1) return sm;

    std::vector<std::size_t> size(comps.count, 0);
    for (int c : comps.product_component) ++size[static_cast<std::size_t>(c)];
    for (int c : comps.country_component) ++size[static_cast<std::size_t>(c)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < comps.count; ++c)
        if (size[c] > size[best]) best = c;

    std::vector<std::size_t> keep_q, keep_p;
    PruneReport prune = sm.prune;
    for (std::size_t q = 0; q < sm.products.size(); ++q) {
        if (comps.product_component[q] == static_cast<int>(best))
            keep_q.push_back(q);
        else
            prune.drop_product(sm.products[q], "outside_largest_component");
    }
    for (std::size_t p = 0; p < sm.countries.size(); ++p) {
        if (comps.country_component[p] == static_cast<int>(best))
            keep_p.push_back(p);
        else
            prune.drop_country(sm.countries[p], "outside_largest_component");
    }
    if (keep_q.size() < 2 || keep_p.size() < 2)
        fail(errc::degenerate, "largest component smaller than 2x2 (" + std::to_string(keep_q.size()) +
                                   "x" + std::to_string(keep_p.size()) + ")");

    Matrix x(keep_q.size(), keep_p.size());
    std::vector<std::string> products, countries;
    for (std::size_t i = 0; i < keep_q.size(); ++i) {
        products.push_back(sm.products[keep_q[i]]);
        for (std::size_t j = 0; j < keep_p.size(); ++j) x(i, j) = sm.x(keep_q[i], keep_p[j]);
    }
    for (std::size_t j = 0; j < keep_p.size(); ++j) countries.push_back(sm.countries[keep_p[j]]);

    SpecializationMatrix out = make_specialization_from_binary(std::move(products), std::move(countries), std::move(x));
    out.prune = std::move(prune);
    return out;
}

ReciprocalAveraging reciprocal_averaging(const SpecializationMatrix& sm, double tol, int max_iter,
                                         SignConvention sign) {
    if (!(tol > 0.0)) fail(errc::argument, "reciprocal_averaging: tol must be positive");
    if (max_iter < 1) fail(errc::argument, "reciprocal_averaging: max_iter must be at least 1");
    const Components comps = bipartite_components(sm);
    if (comps.count > 1)
        fail(errc::disconnected, "reciprocal_averaging: eigenvalue 1 repeats on disconnected data; " +
                                     describe_components(sm, comps));

    const Matrix c = cooccurrence_country(sm);
    const std::size_t m = sm.countries.size();

    // Seed with the country-average of ubiquities (the first reflections
    // step); fall back to an index ramp when that is constant.
    Vec v = kernels::multiply_tvec(sm.xd, sm.ubiquity);
    if (stats::standardize_weighted(v, sm.w) == 0.0) {
        for (std::size_t p = 0; p < m; ++p) v[p] = static_cast<double>(p);
        stats::standardize_weighted(v, sm.w);
    }

    ReciprocalAveraging out;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        Vec next = kernels::multiply_vec(c, v);
        const double scale = stats::standardize_weighted(next, sm.w);
        if (scale == 0.0)
            fail(errc::numerical, "reciprocal_averaging: iterate collapsed to a constant vector");
        if (stats::weighted_dot(next, v, sm.w) < 0.0)
            for (double& x : next) x = -x;
        out.residual = stats::max_abs_diff(next, v);
        out.lambda = scale;
        out.iterations = it;
        v = std::move(next);
        if (out.residual < tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        fail(errc::convergence, "reciprocal_averaging: no convergence in " + std::to_string(max_iter) +
                                    " iterations (residual " + std::to_string(out.residual) + ")");

    if (sign == SignConvention::standard) orient_by_correlation(v, sm.diversity);
    out.country_axis = std::move(v);
    out.product_axis = kernels::multiply_vec(sm.xu, out.country_axis);
    return out;
}

CaResult ca_eigen(const SpecializationMatrix& sm, std::size_t num_axes, SignConvention sign) {
    const std::size_t n = sm.products.size(), m = sm.countries.size();
    if (num_axes < 1 || num_axes > m - 1)
        fail(errc::argument, "ca_eigen: num_axes must be in [1, " + std::to_string(m - 1) + "], got " +
                                 std::to_string(num_axes));
    const Components comps = bipartite_components(sm);
    if (comps.count > 1)
        fail(errc::disconnected,
             "ca_eigen: specialization matrix is disconnected; " + describe_components(sm, comps));

    // K = X' S^{-1} X is exactly symmetric as computed (each (i,j) pair sums
    // the same 1/s_q terms in the same order), and so is the similarity
    // M = D^{-1/2} K D^{-1/2}.
    const Matrix k = kernels::multiply_at_b(sm.x, sm.xu);
    Matrix sym(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            sym(i, j) = k(i, j) / std::sqrt(sm.diversity[i] * sm.diversity[j]);

    const auto eig = eigen::jacobi_symmetric(sym);

    CaResult out;
    out.trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) out.trace += k(i, i) / sm.diversity[i];

    if (std::abs(eig.values[0] - 1.0) > 1e-10)
        fail(errc::numerical, "ca_eigen: trivial eigenvalue not reproduced (got " +
                                  std::to_string(eig.values[0]) + ")");
    if (m > 1 && eig.values[1] > 1.0 - 1e-10)
        fail(errc::disconnected, "ca_eigen: eigenvalue 1 has multiplicity above 1");

    out.eigenvalues.resize(num_axes);
    out.country_axes = Matrix(m, num_axes);
    for (std::size_t j = 0; j < num_axes; ++j) {
        const double lambda = eig.values[j + 1];
        if (lambda <= 1e-14)
            fail(errc::degenerate, "ca_eigen: axis " + std::to_string(j + 1) +
                                       " has zero eigenvalue; the table supports fewer axes");
        out.eigenvalues[j] = lambda;

        Vec v(m);
        for (std::size_t p = 0; p < m; ++p) v[p] = eig.vectors(p, j + 1) / std::sqrt(sm.diversity[p]);
        if (stats::standardize_weighted(v, sm.w) == 0.0)
            fail(errc::numerical, "ca_eigen: axis " + std::to_string(j + 1) + " collapsed to a constant");
        if (sign == SignConvention::standard) orient_by_correlation(v, sm.diversity);
        out.country_axes.set_col(j, v);
    }
    out.product_axes = kernels::multiply(sm.xu, out.country_axes);
    (void)n;

    for (std::size_t j = 0; j + 1 < num_axes; ++j)
        if (std::abs(out.eigenvalues[j] - out.eigenvalues[j + 1]) <= 1e-12)
            out.method_meta.repeated_eigenvalues = true;
    if (num_axes + 1 < m && std::abs(out.eigenvalues[num_axes - 1] - eig.values[num_axes + 1]) <= 1e-12)
        out.method_meta.repeated_eigenvalues = true;

    out.method_meta.solver = "jacobi";
    out.method_meta.iterations = eig.sweeps;
    out.method_meta.residual = eig.off_norm;
    out.inertia_shares = inertia_shares(out);
    return out;
}

Vec inertia_shares(const CaResult& result) {
    if (result.trace <= 1.0 + 1e-12)
        fail(errc::degenerate, "inertia_shares: trace must exceed 1, got " + std::to_string(result.trace));
    Vec shares(result.eigenvalues.size());
    for (std::size_t i = 0; i < shares.size(); ++i)
        shares[i] = result.eigenvalues[i] / (result.trace - 1.0);
    return shares;
}

double chi2_distance(const SpecializationMatrix& sm, std::size_t p1, std::size_t p2) {
    const std::size_t n = sm.products.size();
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        const double diff = sm.x(q, p1) / sm.diversity[p1] - sm.x(q, p2) / sm.diversity[p2];
        acc += (sm.x_plus / sm.ubiquity[q]) * diff * diff;
    }
    return std::sqrt(acc);
}

} // namespace ecc
