#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ecc/ca.hpp"
#include "ecc/cca.hpp"
#include "ecc/ingest.hpp"

namespace ecc {

// Type-1 scaling: per-axis division by sqrt(lambda). Countries remain the
// RCA-weighted barycenter of their products: V_hat = Xd' U_hat.
struct ScaledScores {
    Matrix u_hat; // n x k, product coordinates
    Matrix v_hat; // m x k, country coordinates
};

ScaledScores scale_type1(const Matrix& u, const Matrix& v, const Vec& lambda);
ScaledScores scale_type1(const CaResult& r);
ScaledScores scale_type1(const CcaResult& r);

// Intraclass correlations A(i,j) between variable i and country axis j,
// computed against the W-standardized axis. Invariant to any positive
// rescaling of the axes, so rays drawn over V or V_hat are identical.
struct VariableRays {
    std::vector<std::string> names; // z variable labels
    Matrix a;                       // z x k, entries in [-1, 1]
};

VariableRays intraclass_correlations(const CountryVariableTable& env, const Matrix& country_scores,
                                     const SpecializationMatrix& sm);
VariableRays intraclass_correlations(const CountryVariableTable& env, const CaResult& r,
                                     const SpecializationMatrix& sm);
VariableRays intraclass_correlations(const CountryVariableTable& env, const CcaResult& r,
                                     const SpecializationMatrix& sm);

// Technology-category codes for the product mapping file.
inline constexpr std::array<const char*, 11> lall_categories = {
    "PPm", "PPo", "RBa", "RBo", "LTt", "LTo", "MTa", "MTp", "MTe", "HTe", "HTo"};

// `product,category` rows; categories restricted to lall_categories.
// Returns pairs sorted by product, products unique.
std::vector<std::pair<std::string, std::string>> parse_lall_csv(const std::string& bytes);

// Ubiquity-weighted group centroids over all axes of the scaled scores.
// A singleton group's centroid is its product's row verbatim.
struct Centroid {
    std::string group;
    Vec coords;
    double total_ubiquity = 0.0;
    double mean_ubiquity = 0.0;
    std::size_t members = 0;
};

struct CentroidTable {
    std::vector<Centroid> rows;            // sorted by group label
    std::vector<std::string> unmapped;     // products folded into the "unmapped" group
    std::vector<std::string> empty_groups; // mapped categories with no surviving products
};

CentroidTable group_centroids(const ScaledScores& scores, const SpecializationMatrix& sm,
                              const std::vector<std::pair<std::string, std::string>>& mapping);

struct BiplotPoint {
    std::string label;
    std::string kind; // "country", "product" or "centroid"
    double x = 0.0;
    double y = 0.0;
    double size = 0.0; // marker radius in pixels, monotone in the sizing value
    std::string group;
    bool clipped = false;
};

struct BiplotRay {
    std::string label;
    double x = 0.0;
    double y = 0.0;
    std::string color;
};

struct BiplotOptions {
    std::size_t axis_a = 1; // 1-based non-trivial axis indices; a == b is
    std::size_t axis_b = 2; // allowed (single-axis results plot (1,1))
    double cap_a = 0.0;     // symmetric |coordinate| limit, 0 = uncapped
    double cap_b = 0.0;
    bool ray_back_extension = false; // dashed continuation through the origin
    std::string axis_prefix = "CA";
};

struct BiplotModel {
    std::size_t axis_a = 1;
    std::size_t axis_b = 2;
    std::string label_a; // e.g. "CCA-1 (41.2%)"
    std::string label_b;
    double cap_a = 0.0;
    double cap_b = 0.0;
    bool ray_back_extension = false;
    bool label_products = true; // false above 50 product points
    std::vector<BiplotPoint> points; // countries first, then products or centroids
    std::vector<BiplotRay> rays;
    std::vector<std::string> clipped; // labels of capped-out points
};

// Countries always become points sized by diversity; products sized by
// ubiquity unless a centroid table replaces them (sized by mean ubiquity).
BiplotModel assemble_biplot(const ScaledScores& scores, const SpecializationMatrix& sm,
                            const Vec& inertia_shares, const VariableRays* rays,
                            const CentroidTable* centroids, const BiplotOptions& options);

// Deterministic SVG 1.1 bytes: one circle per point, one line per ray
// anchored at the origin, axis labels carrying inertia percentages.
std::string render_svg(const BiplotModel& model);

// `entity,kind,axis_a,axis_b,size,group` rows for every point and ray.
std::string biplot_csv(const BiplotModel& model);

} // namespace ecc
