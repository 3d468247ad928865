#pragma once

#include "ecc/matrix.hpp"

namespace ecc::stats {

// Weighted moments. Weights are expected to be nonnegative and to sum to 1
// (diversity shares); none of these renormalize.
double weighted_mean(const Vec& x, const Vec& w);
double weighted_var(const Vec& x, const Vec& w); // around the weighted mean

// Center to weighted mean 0 and scale to weighted variance 1, in place.
// Returns the scale factor (the weighted standard deviation before scaling).
double standardize_weighted(Vec& x, const Vec& w);

// Correlation of weighted-standardized copies of x and y.
double weighted_correlation(const Vec& x, const Vec& y, const Vec& w);

double pearson(const Vec& x, const Vec& y);
double spearman(const Vec& x, const Vec& y);

double dot(const Vec& x, const Vec& y);
double weighted_dot(const Vec& x, const Vec& y, const Vec& w);
double norm2(const Vec& x);
double max_abs_diff(const Vec& x, const Vec& y);

} // namespace ecc::stats
