#include "ecc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "ecc/csv.hpp"
#include "ecc/error.hpp"
#include "ecc/stats.hpp"

namespace ecc {

namespace {

std::string at_line(const char* file_kind, std::size_t line, const std::string& what) {
    return std::string(file_kind) + " line " + std::to_string(line) + ": " + what;
}

bool parse_integer(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    return end == s.c_str() + s.size() && errno == 0;
}

std::size_t index_of(const std::vector<std::string>& sorted_labels, const std::string& label) {
    const auto it = std::lower_bound(sorted_labels.begin(), sorted_labels.end(), label);
    return static_cast<std::size_t>(it - sorted_labels.begin());
}

// Derives s, d, x_plus, Xu, Xd, w from a pruned binary matrix.
void finish_views(SpecializationMatrix& sm) {
    const std::size_t n = sm.x.rows(), m = sm.x.cols();
    sm.ubiquity.assign(n, 0.0);
    sm.diversity.assign(m, 0.0);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) {
            sm.ubiquity[q] += sm.x(q, p);
            sm.diversity[p] += sm.x(q, p);
        }
    sm.x_plus = 0.0;
    for (double v : sm.ubiquity) sm.x_plus += v;

    sm.xu = Matrix(n, m);
    sm.xd = Matrix(n, m);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) {
            sm.xu(q, p) = sm.x(q, p) / sm.ubiquity[q];
            sm.xd(q, p) = sm.x(q, p) / sm.diversity[p];
        }
    sm.w.resize(m);
    for (std::size_t p = 0; p < m; ++p) sm.w[p] = sm.diversity[p] / sm.x_plus;
}

} // namespace

void PruneReport::drop_product(const std::string& label, const std::string& reason) {
    dropped_products.push_back(label);
    reasons.emplace_back("product:" + label, reason);
}

void PruneReport::drop_country(const std::string& label, const std::string& reason) {
    dropped_countries.push_back(label);
    reasons.emplace_back("country:" + label, reason);
}

void PruneReport::merge(const PruneReport& other) {
    dropped_products.insert(dropped_products.end(), other.dropped_products.begin(),
                            other.dropped_products.end());
    dropped_countries.insert(dropped_countries.end(), other.dropped_countries.begin(),
                             other.dropped_countries.end());
    reasons.insert(reasons.end(), other.reasons.begin(), other.reasons.end());
}

bool PruneReport::empty() const noexcept {
    return dropped_products.empty() && dropped_countries.empty();
}

TradeTable parse_trade_csv(const std::string& bytes) {
    const csv::Table table = csv::parse(bytes);
    const std::vector<std::string> expected = {"year", "country", "product", "value"};
    if (table.header != expected)
        fail(errc::parse, "trade CSV: header must be exactly `year,country,product,value`");
    if (table.rows.empty()) fail(errc::degenerate, "trade CSV: empty table");

    TradeTable out;
    bool have_year = false;
    std::map<std::pair<std::string, std::string>, double> cells;
    for (const auto& row : table.rows) {
        if (row.fields.size() != 4)
            fail(errc::parse, at_line("trade CSV", row.line,
                                      "expected 4 fields, got " + std::to_string(row.fields.size())));
        long long year = 0;
        if (!parse_integer(row.fields[0], year))
            fail(errc::parse, at_line("trade CSV", row.line, "year is not an integer: `" + row.fields[0] + "`"));
        if (!have_year) {
            out.year = year;
            have_year = true;
        } else if (year != out.year) {
            fail(errc::parse, at_line("trade CSV", row.line,
                                      "mixed years: table holds " + std::to_string(out.year) +
                                          ", row has " + std::to_string(year)));
        }
        const std::string& country = row.fields[1];
        const std::string& product = row.fields[2];
        if (country.empty()) fail(errc::parse, at_line("trade CSV", row.line, "empty country code"));
        if (product.empty()) fail(errc::parse, at_line("trade CSV", row.line, "empty product code"));
        bool ok = false;
        const double value = csv::parse_number(row.fields[3], ok);
        if (!ok || !std::isfinite(value))
            fail(errc::parse, at_line("trade CSV", row.line, "value is not numeric: `" + row.fields[3] + "`"));
        if (value < 0.0)
            fail(errc::domain, at_line("trade CSV", row.line, "negative value: " + row.fields[3]));
        cells[{country, product}] += value;
    }

    bool any_positive = false;
    out.records.reserve(cells.size());
    for (const auto& [key, value] : cells) {
        out.records.push_back({key.first, key.second, value});
        any_positive = any_positive || value > 0.0;
    }
    if (!any_positive) fail(errc::degenerate, "trade CSV: empty table (no positive values)");
    return out;
}

VariableFile parse_variables_csv(const std::string& bytes) {
    const csv::Table table = csv::parse(bytes);
    if (table.header.empty() || table.header[0] != "country")
        fail(errc::parse, "variables CSV: header must be `country,<name1>,...`");
    if (table.header.size() < 2) fail(errc::parse, "variables CSV: no variable columns");

    VariableFile out;
    out.names.assign(table.header.begin() + 1, table.header.end());
    for (std::size_t i = 0; i < out.names.size(); ++i) {
        if (out.names[i].empty()) fail(errc::parse, "variables CSV: empty variable name in header");
        for (std::size_t j = i + 1; j < out.names.size(); ++j)
            if (out.names[i] == out.names[j])
                fail(errc::parse, "variables CSV: duplicate variable name `" + out.names[i] + "`");
    }

    const std::size_t z = out.names.size();
    std::map<std::string, VariableFile::Entry> entries;
    for (const auto& row : table.rows) {
        if (row.fields.size() != z + 1)
            fail(errc::parse, at_line("variables CSV", row.line,
                                      "expected " + std::to_string(z + 1) + " fields, got " +
                                          std::to_string(row.fields.size())));
        const std::string& country = row.fields[0];
        if (country.empty()) fail(errc::parse, at_line("variables CSV", row.line, "empty country code"));
        if (entries.count(country))
            fail(errc::parse, at_line("variables CSV", row.line, "duplicate country `" + country + "`"));
        VariableFile::Entry e;
        e.country = country;
        e.values.assign(z, 0.0);
        e.present.assign(z, false);
        for (std::size_t j = 0; j < z; ++j) {
            const std::string& cell = row.fields[j + 1];
            if (cell.empty()) continue; // missing
            bool ok = false;
            const double v = csv::parse_number(cell, ok);
            if (!ok || !std::isfinite(v))
                fail(errc::parse, at_line("variables CSV", row.line,
                                          "value for `" + out.names[j] + "` is not numeric: `" + cell + "`"));
            e.values[j] = v;
            e.present[j] = true;
        }
        entries.emplace(country, std::move(e));
    }
    out.entries.reserve(entries.size());
    for (auto& [country, e] : entries) out.entries.push_back(std::move(e));
    return out;
}

RcaMatrix compute_rca(const TradeTable& t) {
    if (t.records.empty()) fail(errc::degenerate, "compute_rca: empty table");

    std::set<std::string> product_set, country_set;
    for (const auto& rec : t.records) {
        product_set.insert(rec.product);
        country_set.insert(rec.country);
    }
    std::vector<std::string> products(product_set.begin(), product_set.end());
    std::vector<std::string> countries(country_set.begin(), country_set.end());

    Matrix v(products.size(), countries.size());
    for (const auto& rec : t.records)
        v(index_of(products, rec.product), index_of(countries, rec.country)) += rec.value;

    Vec product_total(products.size(), 0.0), country_total(countries.size(), 0.0);
    double grand = 0.0;
    for (std::size_t q = 0; q < products.size(); ++q)
        for (std::size_t p = 0; p < countries.size(); ++p) {
            product_total[q] += v(q, p);
            country_total[p] += v(q, p);
            grand += v(q, p);
        }

    RcaMatrix out;
    std::vector<std::size_t> keep_q, keep_p;
    for (std::size_t q = 0; q < products.size(); ++q) {
        if (product_total[q] > 0.0)
            keep_q.push_back(q);
        else
            out.prune.drop_product(products[q], "zero_trade_total");
    }
    for (std::size_t p = 0; p < countries.size(); ++p) {
        if (country_total[p] > 0.0)
            keep_p.push_back(p);
        else
            out.prune.drop_country(countries[p], "zero_trade_total");
    }
    if (keep_q.size() < 2 || keep_p.size() < 2)
        fail(errc::degenerate, "compute_rca: fewer than 2 products or countries with positive totals (" +
                                   std::to_string(keep_q.size()) + " products, " +
                                   std::to_string(keep_p.size()) + " countries)");

    out.r = Matrix(keep_q.size(), keep_p.size());
    for (std::size_t i = 0; i < keep_q.size(); ++i) {
        out.products.push_back(products[keep_q[i]]);
        for (std::size_t j = 0; j < keep_p.size(); ++j)
            out.r(i, j) = v(keep_q[i], keep_p[j]) * grand / (product_total[keep_q[i]] * country_total[keep_p[j]]);
    }
    for (std::size_t j = 0; j < keep_p.size(); ++j) out.countries.push_back(countries[keep_p[j]]);
    return out;
}

SpecializationMatrix binarize(const RcaMatrix& r, double threshold) {
    if (!(threshold > 0.0)) fail(errc::argument, "binarize: threshold must be positive");
    const std::size_t n = r.r.rows(), m = r.r.cols();

    Matrix x0(n, m);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) x0(q, p) = r.r(q, p) > threshold ? 1.0 : 0.0;

    SpecializationMatrix sm;
    sm.prune = r.prune;

    // One pass each: removing an all-zero row cannot zero out a surviving
    // column, and vice versa, so no fixpoint loop is needed.
    std::vector<std::size_t> keep_q, keep_p;
    for (std::size_t q = 0; q < n; ++q) {
        double row_sum = 0.0;
        for (std::size_t p = 0; p < m; ++p) row_sum += x0(q, p);
        if (row_sum > 0.0)
            keep_q.push_back(q);
        else
            sm.prune.drop_product(r.products[q], "no_rca_above_threshold");
    }
    for (std::size_t p = 0; p < m; ++p) {
        double col_sum = 0.0;
        for (std::size_t q : keep_q) col_sum += x0(q, p);
        if (col_sum > 0.0)
            keep_p.push_back(p);
        else
            sm.prune.drop_country(r.countries[p], "no_rca_above_threshold");
    }
    if (keep_q.size() < 2 || keep_p.size() < 2)
        fail(errc::degenerate, "binarize: matrix smaller than 2x2 after pruning (" +
                                   std::to_string(keep_q.size()) + "x" + std::to_string(keep_p.size()) + ")");

    sm.x = Matrix(keep_q.size(), keep_p.size());
    for (std::size_t i = 0; i < keep_q.size(); ++i) {
        sm.products.push_back(r.products[keep_q[i]]);
        for (std::size_t j = 0; j < keep_p.size(); ++j) sm.x(i, j) = x0(keep_q[i], keep_p[j]);
    }
    for (std::size_t j = 0; j < keep_p.size(); ++j) sm.countries.push_back(r.countries[keep_p[j]]);

    finish_views(sm);
    return sm;
}

SpecializationMatrix make_specialization_from_binary(std::vector<std::string> products,
                                                     std::vector<std::string> countries, Matrix x) {
    if (x.rows() != products.size() || x.cols() != countries.size())
        fail(errc::internal, "make_specialization_from_binary: label/matrix shape mismatch");
    if (x.rows() < 2 || x.cols() < 2)
        fail(errc::degenerate, "make_specialization_from_binary: matrix smaller than 2x2");
    for (std::size_t q = 0; q < x.rows(); ++q)
        for (std::size_t p = 0; p < x.cols(); ++p)
            if (x(q, p) != 0.0 && x(q, p) != 1.0)
                fail(errc::domain, "make_specialization_from_binary: entries must be 0 or 1");
    for (std::size_t q = 0; q < x.rows(); ++q) {
        double s = 0.0;
        for (std::size_t p = 0; p < x.cols(); ++p) s += x(q, p);
        if (s == 0.0)
            fail(errc::degenerate, "make_specialization_from_binary: all-zero row `" + products[q] + "`");
    }
    for (std::size_t p = 0; p < x.cols(); ++p) {
        double d = 0.0;
        for (std::size_t q = 0; q < x.rows(); ++q) d += x(q, p);
        if (d == 0.0)
            fail(errc::degenerate, "make_specialization_from_binary: all-zero column `" + countries[p] + "`");
    }

    SpecializationMatrix sm;
    sm.products = std::move(products);
    sm.countries = std::move(countries);
    sm.x = std::move(x);
    finish_views(sm);
    return sm;
}

CountryVariableTable standardize_environment(const VariableFile& raw, const SpecializationMatrix& sm) {
    const std::size_t z = raw.names.size();
    const std::size_t m = sm.countries.size();
    if (z == 0) fail(errc::degenerate, "standardize_environment: no variables");
    if (z + 1 > m)
        fail(errc::degenerate, "standardize_environment: over-parameterized (" + std::to_string(z) +
                                   " variables + intercept exceed " + std::to_string(m) + " countries)");

    CountryVariableTable out;
    out.names = raw.names;
    out.y_raw = Matrix(m, z);
    for (std::size_t p = 0; p < m; ++p) {
        const std::string& country = sm.countries[p];
        const auto it = std::lower_bound(raw.entries.begin(), raw.entries.end(), country,
                                         [](const VariableFile::Entry& e, const std::string& c) {
                                             return e.country < c;
                                         });
        if (it == raw.entries.end() || it->country != country)
            fail(errc::input, "standardize_environment: country `" + country + "` missing from variables");
        for (std::size_t j = 0; j < z; ++j) {
            if (!it->present[j])
                fail(errc::input, "standardize_environment: country `" + country +
                                      "` missing value for `" + raw.names[j] + "`");
            out.y_raw(p, j) = it->values[j];
        }
    }

    out.y = Matrix(m, z + 1);
    for (std::size_t j = 0; j < z; ++j) {
        Vec col = out.y_raw.col(j);
        const double mean = stats::weighted_mean(col, sm.w);
        const double sd = stats::standardize_weighted(col, sm.w);
        if (!(sd > 1e-13 * std::max(1.0, std::abs(mean))))
            fail(errc::degenerate, "standardize_environment: variable `" + raw.names[j] +
                                       "` has zero weighted variance");
        out.y.set_col(j, col);
    }
    for (std::size_t p = 0; p < m; ++p) out.y(p, z) = 1.0;
    return out;
}

std::vector<std::string> countries_with_complete_rows(const VariableFile& f) {
    std::vector<std::string> out;
    for (const auto& e : f.entries) {
        bool complete = true;
        for (bool p : e.present) complete = complete && p;
        if (complete) out.push_back(e.country);
    }
    return out; // entries are sorted, so out is sorted
}

TradeTable restrict_countries(const TradeTable& t, const std::vector<std::string>& keep,
                              PruneReport& prune, const std::string& reason) {
    TradeTable out;
    out.year = t.year;
    std::set<std::string> dropped;
    for (const auto& rec : t.records) {
        if (std::binary_search(keep.begin(), keep.end(), rec.country))
            out.records.push_back(rec);
        else
            dropped.insert(rec.country);
    }
    for (const auto& c : dropped) prune.drop_country(c, reason);
    return out;
}

} // namespace ecc
