#pragma once

#include <string>

#include "ecc/ingest.hpp"

namespace ecc {

struct MethodMeta {
    std::string solver;
    int iterations = 0;
    double residual = 0.0;
    bool repeated_eigenvalues = false;
};

// Correspondence-analysis ordination. Axis 1 of country_axes is the ECI,
// axis 1 of product_axes the PCI. Country axes are diversity-weighted
// standardized; product axes are Xu times the country axes.
struct CaResult {
    Vec eigenvalues;     // non-trivial, descending, all in (0, 1]
    Matrix country_axes; // m x k
    Matrix product_axes; // n x k
    Vec inertia_shares;  // eigenvalue / (trace - 1)
    double trace = 0.0;  // tr(C^c)
    MethodMeta method_meta;
};

// Un-normalized method-of-reflections indicators; index 0 holds diversity
// (country) and ubiquity (product) verbatim.
struct ReflectionsTrace {
    std::vector<Vec> country;
    std::vector<Vec> product;
};

struct ReciprocalAveraging {
    Vec country_axis; // W-standardized
    Vec product_axis; // Xu * country_axis
    double lambda = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

enum class SignConvention { standard, none };

// C^c = Xd' * Xu: row-stochastic, diversity is a left eigenvector for
// eigenvalue 1, the constant vector a right eigenvector.
Matrix cooccurrence_country(const SpecializationMatrix& sm);

// k+1 iterations of simultaneous averaging, seeded with (d, s).
ReflectionsTrace method_of_reflections(const SpecializationMatrix& sm, int k);

// Power iteration on C^c with diversity-weighted re-standardization each
// round; converges to the leading non-trivial eigenpair. The eigenvalue
// estimate is the pre-standardization scale factor at convergence.
ReciprocalAveraging reciprocal_averaging(const SpecializationMatrix& sm, double tol = 1e-10,
                                         int max_iter = 10000,
                                         SignConvention sign = SignConvention::standard);

// Full eigen route: decompose the symmetric similarity transform
// D^{-1/2} X' S^{-1} X D^{-1/2}, back-transform, drop the trivial pair,
// standardize and sign-fix each axis.
CaResult ca_eigen(const SpecializationMatrix& sm, std::size_t num_axes,
                  SignConvention sign = SignConvention::standard);

Vec inertia_shares(const CaResult& result);

// Connected components of the bipartite product-country graph of X.
// Component ids are assigned in first-occurrence order over products then
// countries, so they are deterministic.
struct Components {
    std::size_t count = 0;
    std::vector<int> product_component; // length n
    std::vector<int> country_component; // length m
};
Components bipartite_components(const SpecializationMatrix& sm);

// Human-readable component listing for disconnection errors.
std::string describe_components(const SpecializationMatrix& sm, const Components& comps);

// Keeps only the largest component (ties: lowest component id); dropped
// labels are appended to the prune report as outside_largest_component.
SpecializationMatrix restrict_to_largest_component(const SpecializationMatrix& sm);

// chi-square distance between the column profiles of countries p1 and p2:
// sum_q (x_plus / s_q) * (x_qp1/d_p1 - x_qp2/d_p2)^2, square-rooted.
double chi2_distance(const SpecializationMatrix& sm, std::size_t p1, std::size_t p2);

// Shared sign helpers. orient_by_correlation flips axis so that its
// unweighted Pearson correlation with ref is >= 0; an exactly-zero
// correlation falls back to making the largest-magnitude entry positive.
// Returns true when the axis was flipped.
bool orient_by_correlation(Vec& axis, const Vec& ref);
bool orient_largest_entry_positive(Vec& axis);

} // namespace ecc
