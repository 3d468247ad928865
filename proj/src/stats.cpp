#include "ecc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecc::stats {

double weighted_mean(const Vec& x, const Vec& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i];
    return acc;
}

double weighted_var(const Vec& x, const Vec& w) {
    const double mu = weighted_mean(x, w);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mu;
        acc += w[i] * d * d;
    }
    return acc;
}

double standardize_weighted(Vec& x, const Vec& w) {
    const double mu = weighted_mean(x, w);
    for (double& v : x) v -= mu;
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) var += w[i] * x[i] * x[i];
    const double sd = std::sqrt(var);
    if (sd > 0.0)
        for (double& v : x) v /= sd;
    return sd;
}

double weighted_dot(const Vec& x, const Vec& y, const Vec& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i] * y[i];
    return acc;
}

double weighted_correlation(const Vec& x, const Vec& y, const Vec& w) {
    Vec xs = x, ys = y;
    standardize_weighted(xs, w);
    standardize_weighted(ys, w);
    return weighted_dot(xs, ys, w);
}

double pearson(const Vec& x, const Vec& y) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

// Midranks, so ties do not bias the rank correlation.
Vec ranks(const Vec& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Vec r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
        i = j + 1;
    }
    return r;
}

} // namespace

double spearman(const Vec& x, const Vec& y) { return pearson(ranks(x), ranks(y)); }

double dot(const Vec& x, const Vec& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

double max_abs_diff(const Vec& x, const Vec& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

} // namespace ecc::stats
