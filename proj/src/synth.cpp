#include "ecc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ecc/ca.hpp"
#include "ecc/csv.hpp"
#include "ecc/error.hpp"
#include "ecc/rng.hpp"

namespace ecc {

namespace {

// Decay rate of suitability with capability mismatch. Sharp enough that the
// leading ordination axis is nearly linear in the ability gradient, smooth
// enough that specialization margins stay far above text round-trip error.
constexpr double kSharpness = 12.0;

std::vector<std::string> make_labels(const char* prefix, std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
        out.emplace_back(buf);
    }
    return out;
}

// Trade values from a comparative-advantage band: country p's budget is
// split across products proportional to exp(-kappa*|ability - difficulty|),
// so each country concentrates near the products matching its capability.
// With probability `noise` a cell's effective ability is resampled, washing
// out the gradient as noise approaches 1. Columns are normalized to unit
// mass. The planted pattern is RCA > 1 of these values, so values and
// pattern can never disagree. Because the margin-weighted mean of RCA is
// exactly 1 along every row and column, no product or country can end up
// with RCA > 1 everywhere or nowhere, which keeps every ubiquity and
// diversity margin strictly inside (0, full).
void suitability_values(SplitMix64& rng, std::size_t n, std::size_t m, double noise,
                        Vec& ability, Vec& difficulty, Matrix& v) {
    ability.resize(m);
    difficulty.resize(n);
    for (std::size_t p = 0; p < m; ++p) ability[p] = rng.unit();
    for (std::size_t q = 0; q < n; ++q) difficulty[q] = rng.unit();

    v = Matrix(n, m);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) {
            double z = ability[p] - difficulty[q];
            if (noise > 0.0 && rng.unit() < noise) z = rng.unit() - difficulty[q];
            v(q, p) = std::exp(-kSharpness * std::abs(z));
        }
    for (std::size_t p = 0; p < m; ++p) {
        double total = 0.0;
        for (std::size_t q = 0; q < n; ++q) total += v(q, p);
        for (std::size_t q = 0; q < n; ++q) v(q, p) /= total;
    }
}

// Specialization pattern of the values; false when any cell sits too close
// to the RCA threshold for the 12-digit text round-trip to preserve it.
bool binary_pattern(const Matrix& v, Matrix& x) {
    const std::size_t n = v.rows(), m = v.cols();
    Vec row(n, 0.0), col(m, 0.0);
    double total = 0.0;
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) {
            row[q] += v(q, p);
            col[p] += v(q, p);
            total += v(q, p);
        }
    x = Matrix(n, m);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) {
            const double rca = v(q, p) * total / (row[q] * col[p]);
            if (std::abs(rca - 1.0) < 1e-9) return false;
            x(q, p) = rca > 1.0 ? 1.0 : 0.0;
        }
    return true;
}

std::string trade_csv_from(const Matrix& v, const std::vector<std::string>& products,
                           const std::vector<std::string>& countries, int year) {
    std::string out = "year,country,product,value\n";
    const std::string y = std::to_string(year);
    for (std::size_t p = 0; p < countries.size(); ++p)
        for (std::size_t q = 0; q < products.size(); ++q)
            out += y + "," + countries[p] + "," + products[q] + "," + csv::format_number(v(q, p)) + "\n";
    return out;
}

// The planting contract is judged through the real pipeline, including the
// 12-digit text round-trip the files will actually go through.
bool verify_plant(const std::string& trade_csv, const Matrix& x,
                  const std::vector<std::string>& products, const std::vector<std::string>& countries,
                  SpecializationMatrix& sm) {
    try {
        sm = binarize(compute_rca(parse_trade_csv(trade_csv)), 1.0);
    } catch (const Error&) {
        return false;
    }
    return sm.prune.empty() && sm.products == products && sm.countries == countries && sm.x == x;
}

} // namespace

SynthResult synthesize(const SynthConfig& cfg) {
    const std::size_t n = cfg.products, m = cfg.countries, z = cfg.num_vars;
    if (n < 2 || m < 2) fail(errc::argument, "synthesize: need at least 2 products and 2 countries");
    if (z < 1) fail(errc::argument, "synthesize: need at least one variable");
    if (z + 2 > m) fail(errc::argument, "synthesize: num_vars must be at most countries - 2");
    if (cfg.noise < 0.0 || cfg.noise >= 1.0) fail(errc::argument, "synthesize: noise must be in [0, 1)");
    if (cfg.var_noise < 0.0) fail(errc::argument, "synthesize: var_noise must be nonnegative");

    const auto products = make_labels("P", n);
    const auto countries = make_labels("C", m);

    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        SplitMix64 rng(cfg.seed ^ (attempt * 0xa5a5a5a5deadbeefull));

        SynthResult out;
        Matrix v, x;
        suitability_values(rng, n, m, cfg.noise, out.ability, out.difficulty, v);
        if (!binary_pattern(v, x)) continue;
        {
            const auto probe = make_specialization_from_binary(products, countries, x);
            if (bipartite_components(probe).count != 1) continue;
        }

        out.trade_csv = trade_csv_from(v, products, countries, cfg.year);
        if (!verify_plant(out.trade_csv, x, products, countries, out.sm)) continue;

        // Variables: v1 tracks ability directly, later columns are random
        // linear functions of it; all get the same additive noise scale.
        std::vector<double> slope(z, 1.0), offset(z, 0.0);
        for (std::size_t j = 1; j < z; ++j) {
            slope[j] = 0.5 + 1.5 * rng.unit();
            offset[j] = 2.0 * rng.unit() - 1.0;
        }
        out.vars_csv = "country";
        out.vars_csv += ",ability";
        for (std::size_t j = 1; j < z; ++j) out.vars_csv += ",v" + std::to_string(j + 1);
        out.vars_csv += "\n";
        for (std::size_t p = 0; p < m; ++p) {
            out.vars_csv += countries[p];
            for (std::size_t j = 0; j < z; ++j) {
                const double noise = cfg.var_noise * (rng.unit() - 0.5);
                out.vars_csv += "," + csv::format_number(slope[j] * out.ability[p] + offset[j] + noise);
            }
            out.vars_csv += "\n";
        }

        out.truth_csv = "kind,label,value\n";
        for (std::size_t p = 0; p < m; ++p)
            out.truth_csv += "ability," + countries[p] + "," + csv::format_number(out.ability[p]) + "\n";
        for (std::size_t q = 0; q < n; ++q)
            out.truth_csv += "difficulty," + products[q] + "," + csv::format_number(out.difficulty[q]) + "\n";
        return out;
    }
    fail(errc::numerical, "synthesize: could not realize a connected specialization pattern; "
                          "try another seed or lower noise");
}

} // namespace ecc
