#pragma once

#include "ecc/ca.hpp"
#include "ecc/ingest.hpp"

namespace ecc {

// Weighted-regression operator T = [Y'WY]^{-1} Y'W. The hat operator
// H = Y T projects onto span(Y) in the W-inner product.
struct EnvironmentOperator {
    Matrix t;                // (z+1) x m
    double rcond = 0.0;      // of Y'WY
    double smallest = 0.0;   // smallest singular value of Y'WY
};

// Canonical ordination. E holds unit-Euclidean-norm eigenvectors of
// Phi = YTC^c, E_std their W-standardized versions (the canonical
// representative: d'E_std = 0, E_std'WE_std = 1). U, V, B follow the
// construction identities U = Xu E_std, V = Xd'U, B = TV.
struct CcaResult {
    Vec lambda;         // non-trivial canonical eigenvalues, descending
    Matrix e;           // m x k
    Matrix e_std;       // m x k
    Matrix u;           // n x k
    Matrix v;           // m x k
    Matrix b;           // (z+1) x k, intercept row last
    Vec inertia_shares; // lambda / (trace(C^c) - 1)
    double trace = 0.0;
    MethodMeta method_meta;
};

EnvironmentOperator regression_operator(const CountryVariableTable& env, const SpecializationMatrix& sm);

// Eigen route: subspace iteration on the W-self-adjoint operator H C^c H
// with the constant vector deflated in the W-inner product, Rayleigh-Ritz
// extraction, block size z.
CcaResult cca_eigen(const SpecializationMatrix& sm, const CountryVariableTable& env,
                    std::size_t num_axes, SignConvention sign = SignConvention::standard);

// Ter Braak's iterative algorithm: averaging, weighted regression, adoption
// of fitted values, W-orthogonalization against previous axes, and
// standardization, per axis until scores settle.
CcaResult cca_iterative(const SpecializationMatrix& sm, const CountryVariableTable& env,
                        std::size_t num_axes, double tol = 1e-10, int max_iter = 10000,
                        SignConvention sign = SignConvention::standard);

// Per-axis orthogonality and span diagnostics. _rel values are normalized
// by the Euclidean norms of the factors; span_rel is ||H e - e|| / ||e||
// and is reported as 0 for CA results (no constraining span).
struct AxisResiduals {
    double dv_abs = 0.0;
    double dv_rel = 0.0;
    double su_abs = 0.0;
    double su_rel = 0.0;
    double wnorm = 0.0;   // |e_std' W e_std - 1|
    double de_rel = 0.0;  // |d' e_std| relative
    double span_rel = 0.0;
};

struct OrthogonalityReport {
    std::vector<AxisResiduals> axes;
    double rel_tolerance = 1e-8;
    double norm_tolerance = 1e-10;
    bool pass = true;
};

OrthogonalityReport validate_ordination(const CaResult& result, const SpecializationMatrix& sm);
OrthogonalityReport validate_ordination(const CcaResult& result, const SpecializationMatrix& sm,
                                        const CountryVariableTable& env);

} // namespace ecc
