#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ecc/ca.hpp"
#include "ecc/cca.hpp"
#include "ecc/ingest.hpp"

namespace ecc {

inline constexpr const char* version_string = "ecc 0.1.0";

// Everything a run records beside the score files. Serialized as JSON with
// alphabetically ordered object keys and library-default number formatting,
// both deterministic, so identical runs produce identical bytes.
struct RunReport {
    std::string command;
    std::map<std::string, std::string> inputs; // role -> FNV-1a digest of the bytes
    std::size_t axes_requested = 0;
    std::size_t axes_effective = 0;
    std::vector<double> eigenvalues;
    std::vector<double> inertia_shares;
    double trace = 0.0;
    MethodMeta method;
    PruneReport pruned;
    OrthogonalityReport residuals;                                 // empty axes = not computed
    std::vector<std::pair<std::string, double>> extra_numbers;     // command-specific facts
    std::vector<std::pair<std::string, std::uint64_t>> extra_counts;
    std::vector<std::pair<std::string, std::string>> extra_strings;
    std::vector<std::pair<std::string, bool>> extra_flags;
    std::vector<std::pair<std::string, std::vector<std::string>>> extra_lists;
};

std::string report_json(const RunReport& r);

// Solver agreement for method=both: per-axis diversity-weighted correlation
// of the country scores and absolute eigenvalue gap.
struct EquivalenceReport {
    std::vector<double> correlations;
    std::vector<double> eigenvalue_gaps;
};

std::string equivalence_json(const EquivalenceReport& r);

} // namespace ecc
