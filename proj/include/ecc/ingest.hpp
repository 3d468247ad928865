#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ecc/matrix.hpp"

namespace ecc {

struct TradeRecord {
    std::string country;
    std::string product;
    double value = 0.0;
};

// One year of export records. (country, product) pairs are unique; duplicate
// input rows are summed. Records are sorted by (country, product).
struct TradeTable {
    long long year = 0;
    std::vector<TradeRecord> records;
};

// Labels removed between the raw table and the final matrix, with a reason
// string per item ("product:<label>" / "country:<label>" keys).
struct PruneReport {
    std::vector<std::string> dropped_products;
    std::vector<std::string> dropped_countries;
    std::vector<std::pair<std::string, std::string>> reasons;

    void drop_product(const std::string& label, const std::string& reason);
    void drop_country(const std::string& label, const std::string& reason);
    void merge(const PruneReport& other);
    bool empty() const noexcept;
};

struct RcaMatrix {
    std::vector<std::string> products;   // row labels, sorted, length n
    std::vector<std::string> countries;  // column labels, sorted, length m
    Matrix r;                            // n x m, nonnegative
    PruneReport prune;                   // zero-total drops
};

// Binary specialization matrix X plus every derived view the ordinations use.
// Rows are products, columns are countries: ubiquity s = row sums, diversity
// d = column sums, Xu = rows of X divided by s, Xd = columns divided by d,
// w = d / x_plus (diagonal of the country weight matrix W).
struct SpecializationMatrix {
    std::vector<std::string> products;
    std::vector<std::string> countries;
    Matrix x;
    Vec ubiquity;       // length n
    Vec diversity;      // length m
    double x_plus = 0.0;
    Matrix xu;
    Matrix xd;
    Vec w;              // length m
    PruneReport prune;
};

// Raw per-country variable rows as read from disk; cells may be missing.
struct VariableFile {
    std::vector<std::string> names; // z column names
    struct Entry {
        std::string country;
        std::vector<double> values;
        std::vector<bool> present;
    };
    std::vector<Entry> entries; // sorted by country, unique
};

inline constexpr const char* intercept_name = "(intercept)";

// Environment table aligned to a SpecializationMatrix: y_raw holds the input
// values in country order, y the weighted-standardized columns plus a final
// constant column (the intercept).
struct CountryVariableTable {
    std::vector<std::string> names; // z variable names, intercept excluded
    Matrix y_raw;                   // m x z
    Matrix y;                       // m x (z+1)
};

// Header must be exactly `year,country,product,value`. All rows must share
// one year. Malformed rows raise parse errors naming the line; negative
// values raise domain errors.
TradeTable parse_trade_csv(const std::string& bytes);

// Header `country,<name1>,...,<namez>`; an empty cell marks a missing value.
VariableFile parse_variables_csv(const std::string& bytes);

// R_qp = (v_qp / product-total) / (country-total / grand-total). Products and
// countries whose totals are zero are dropped before division and reported.
RcaMatrix compute_rca(const TradeTable& t);

// x_qp = 1 iff R_qp > threshold (strict). All-zero rows, then all-zero
// columns, are pruned in one pass each; d, s, x_plus, Xu, Xd, w are computed
// on the pruned matrix.
SpecializationMatrix binarize(const RcaMatrix& r, double threshold = 1.0);

// Builds the derived views directly from a binary matrix; used by the
// synthetic generator and tests. The matrix must already be prunable-free:
// every row and column sum positive, at least 2x2.
SpecializationMatrix make_specialization_from_binary(std::vector<std::string> products,
                                                     std::vector<std::string> countries,
                                                     Matrix x);

// Aligns raw variables to sm's countries and standardizes each column to
// diversity-weighted mean 0 / variance 1; appends the constant column.
// Every sm country must be present with all values; the pipeline driver
// removes incomplete countries before the matrix is built.
CountryVariableTable standardize_environment(const VariableFile& raw, const SpecializationMatrix& sm);

// Countries whose variable rows are complete (no missing cell), sorted.
std::vector<std::string> countries_with_complete_rows(const VariableFile& f);

// Drops records whose country is not in keep (sorted list); dropped countries
// are appended to prune with the given reason.
TradeTable restrict_countries(const TradeTable& t, const std::vector<std::string>& keep,
                              PruneReport& prune, const std::string& reason);

} // namespace ecc
