#include "ecc/report.hpp"

#include <json.hpp>

namespace ecc {

namespace {

using nlohmann::json;

json prune_to_json(const PruneReport& p) {
    json j;
    j["countries"] = p.dropped_countries;
    j["products"] = p.dropped_products;
    json reasons = json::array();
    for (const auto& [item, why] : p.reasons) reasons.push_back(json::array({item, why}));
    j["reasons"] = reasons;
    return j;
}

json residuals_to_json(const OrthogonalityReport& r) {
    json axes = json::array();
    for (std::size_t j = 0; j < r.axes.size(); ++j) {
        const AxisResiduals& a = r.axes[j];
        json row;
        row["axis"] = j + 1;
        row["dv_rel"] = a.dv_rel;
        row["su_rel"] = a.su_rel;
        row["de_rel"] = a.de_rel;
        row["wnorm"] = a.wnorm;
        row["span_rel"] = a.span_rel;
        axes.push_back(row);
    }
    return axes;
}

} // namespace

std::string report_json(const RunReport& r) {
    json j;
    j["command"] = r.command;
    j["version"] = version_string;
    j["inputs"] = json(r.inputs);
    j["axes"] = {{"requested", r.axes_requested}, {"effective", r.axes_effective}};
    j["eigenvalues"] = r.eigenvalues;
    j["inertia_shares"] = r.inertia_shares;
    j["trace"] = r.trace;
    j["solver"] = r.method.solver;
    j["iterations"] = r.method.iterations;
    j["residual"] = r.method.residual;
    j["pruned"] = prune_to_json(r.pruned);
    j["residuals"] = residuals_to_json(r.residuals);
    for (const auto& [key, value] : r.extra_numbers) j[key] = value;
    for (const auto& [key, value] : r.extra_counts) j[key] = value;
    for (const auto& [key, value] : r.extra_strings) j[key] = value;
    for (const auto& [key, value] : r.extra_flags) j[key] = value;
    for (const auto& [key, value] : r.extra_lists) j[key] = value;
    return j.dump(2) + "\n";
}

std::string equivalence_json(const EquivalenceReport& r) {
    json axes = json::array();
    double min_corr = 1.0;
    double max_gap = 0.0;
    for (std::size_t j = 0; j < r.correlations.size(); ++j) {
        json row;
        row["axis"] = j + 1;
        row["correlation"] = r.correlations[j];
        row["eigenvalue_gap"] = r.eigenvalue_gaps[j];
        axes.push_back(row);
        if (r.correlations[j] < min_corr) min_corr = r.correlations[j];
        if (r.eigenvalue_gaps[j] > max_gap) max_gap = r.eigenvalue_gaps[j];
    }
    json j;
    j["axes"] = axes;
    j["min_correlation"] = min_corr;
    j["max_eigenvalue_gap"] = max_gap;
    j["version"] = version_string;
    return j.dump(2) + "\n";
}

} // namespace ecc
