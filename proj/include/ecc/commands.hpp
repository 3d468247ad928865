#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ecc/error.hpp"

namespace ecc {

// Process exit codes: 0 success, 1..10 the Error classes in errc order, 12 a
// validation run whose residuals exceed the requested tolerances.
int exit_code_for(errc code) noexcept;
inline constexpr int exit_validation_failed = 12;

// One run of any subcommand. The CLI front end fills this in (flags override
// config-file values override the defaults below); the run_* functions do the
// work, so tests can drive commands in-process.
struct RunConfig {
    std::string trade_path;
    std::string vars_path; // optional for ca/biplot/validate, required for cca
    std::string lall_path; // optional product-to-category mapping for biplot
    std::string out_dir = "out";

    std::string method = "eigen"; // eigen | iterative | both
    std::size_t axes = 2;         // clamped to what the pruned table supports
    double tol = 1e-10;
    int max_iter = 10000;
    double rca_threshold = 1.0;
    bool largest_component = false; // fold to the largest component instead of failing
    std::string sign = "standard";  // standard | none
    int reflections = 0;            // ca: rounds of method-of-reflections to dump

    std::string ordination = "auto"; // biplot/validate: ca | cca | auto (cca iff vars given)
    std::size_t axis_a = 1;          // displayed axis pair, 1-based
    std::size_t axis_b = 2;
    std::vector<std::pair<std::size_t, double>> caps; // axis -> |coordinate| limit
    bool ray_extension = false;

    double validate_rel = 1e-8;   // validate: relative residual tolerance
    double validate_norm = 1e-10; // validate: |e'We - 1| tolerance

    std::size_t countries = 50; // synth
    std::size_t products = 200;
    std::size_t num_vars = 1;
    double noise = 0.0;
    double var_noise = 0.0;
    std::uint64_t seed = 1;
    int year = 2018;
};

// Each returns a process exit code and reports failures on stderr. Artifacts
// land in cfg.out_dir, which is created if missing.
int run_ca(const RunConfig& cfg);       // eci.csv pci.csv report.json [reflections.csv] [equivalence.json]
int run_cca(const RunConfig& cfg);      // e_std.csv u.csv v.csv b.csv report.json [equivalence.json]
int run_biplot(const RunConfig& cfg);   // biplot.svg biplot.csv report.json
int run_validate(const RunConfig& cfg); // validation.json; exit 12 when residuals fail
int run_synth(const RunConfig& cfg);    // trade.csv vars.csv truth.csv report.json

} // namespace ecc
