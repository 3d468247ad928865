#include "ecc/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include "ecc/biplot.hpp"
#include "ecc/csv.hpp"
#include "ecc/report.hpp"
#include "ecc/stats.hpp"
#include "ecc/synth.hpp"

namespace fs = std::filesystem;

namespace ecc {

int exit_code_for(errc code) noexcept {
    switch (code) {
        case errc::argument: return 1;
        case errc::input: return 2;
        case errc::parse: return 3;
        case errc::domain: return 4;
        case errc::degenerate: return 5;
        case errc::disconnected: return 6;
        case errc::collinear: return 7;
        case errc::convergence: return 8;
        case errc::numerical: return 9;
        case errc::internal: return 10;
    }
    return 10;
}

namespace {

int emit_error(const char* command, const Error& e) {
    std::fprintf(stderr, "ecc %s: %s error: %s\n", command, errc_name(e.code()), e.what());
    return exit_code_for(e.code());
}

int emit_unexpected(const char* command, const std::exception& e) {
    std::fprintf(stderr, "ecc %s: internal error: %s\n", command, e.what());
    return exit_code_for(errc::internal);
}

void check_common(const RunConfig& cfg, bool need_trade) {
    if (cfg.tol <= 0.0) fail(errc::argument, "tol must be positive");
    if (cfg.max_iter < 1) fail(errc::argument, "max-iter must be at least 1");
    if (cfg.axes < 1) fail(errc::argument, "axes must be at least 1");
    if (cfg.rca_threshold <= 0.0) fail(errc::argument, "rca-threshold must be positive");
    if (cfg.method != "eigen" && cfg.method != "iterative" && cfg.method != "both")
        fail(errc::argument, "method must be eigen, iterative or both, got '" + cfg.method + "'");
    if (cfg.sign != "standard" && cfg.sign != "none")
        fail(errc::argument, "sign must be standard or none, got '" + cfg.sign + "'");
    if (cfg.ordination != "auto" && cfg.ordination != "ca" && cfg.ordination != "cca")
        fail(errc::argument, "ordination must be auto, ca or cca, got '" + cfg.ordination + "'");
    if (need_trade && cfg.trade_path.empty()) fail(errc::argument, "a trade input path is required");
    if (cfg.out_dir.empty()) fail(errc::argument, "an output directory is required");
}

SignConvention sign_of(const RunConfig& cfg) {
    return cfg.sign == "none" ? SignConvention::none : SignConvention::standard;
}

// Shared front half of every analysis command: read and digest the inputs,
// intersect trade countries with complete variable rows before binarization,
// binarize at the configured threshold, and settle connectivity.
struct Pipeline {
    SpecializationMatrix sm;
    VariableFile raw_vars;
    CountryVariableTable env;
    bool has_vars = false;
    std::map<std::string, std::string> digests;
};

Pipeline load_pipeline(const RunConfig& cfg, bool need_vars) {
    Pipeline p;
    const std::string trade_bytes = csv::read_file(cfg.trade_path);
    p.digests["trade"] = csv::fnv1a_hex(trade_bytes);
    TradeTable trade = parse_trade_csv(trade_bytes);

    PruneReport pre;
    if (!cfg.vars_path.empty()) {
        const std::string vars_bytes = csv::read_file(cfg.vars_path);
        p.digests["vars"] = csv::fnv1a_hex(vars_bytes);
        p.raw_vars = parse_variables_csv(vars_bytes);
        p.has_vars = true;
        trade = restrict_countries(trade, countries_with_complete_rows(p.raw_vars), pre,
                                   "no_complete_variable_row");
    } else if (need_vars) {
        fail(errc::argument, "a country-variables input path is required");
    }

    const RcaMatrix rca = compute_rca(trade);
    p.sm = binarize(rca, cfg.rca_threshold);
    pre.merge(p.sm.prune);
    p.sm.prune = std::move(pre);

    const Components comps = bipartite_components(p.sm);
    if (comps.count > 1) {
        if (!cfg.largest_component) fail(errc::disconnected, describe_components(p.sm, comps));
        p.sm = restrict_to_largest_component(p.sm);
    }
    if (p.has_vars) p.env = standardize_environment(p.raw_vars, p.sm);
    return p;
}

std::size_t clamp_axes(std::size_t requested, std::size_t available) {
    return std::min(requested, std::max<std::size_t>(available, 1));
}

Matrix column_matrix(const Vec& v) {
    Matrix m(v.size(), 1);
    m.set_col(0, v);
    return m;
}

double cooccurrence_trace(const SpecializationMatrix& sm) {
    const Matrix cc = cooccurrence_country(sm);
    double t = 0.0;
    for (std::size_t p = 0; p < cc.rows(); ++p) t += cc(p, p);
    return t;
}

std::string axes_csv(const char* id_column, const std::vector<std::string>& labels, const Matrix& a) {
    std::string out(id_column);
    for (std::size_t j = 0; j < a.cols(); ++j) out += ",axis" + std::to_string(j + 1);
    out += "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += labels[i];
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out += ',';
            out += csv::format_number(a(i, j));
        }
        out += "\n";
    }
    return out;
}

// Canonical coefficients in long form; the intercept row of B comes last,
// matching its position in the coefficient matrix.
std::string coefficients_csv(const std::vector<std::string>& names, const Matrix& b) {
    std::string out = "variable,axis,coefficient\n";
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const std::string& name = i < names.size() ? names[i] : std::string(intercept_name);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            out += name;
            out += ',';
            out += std::to_string(j + 1);
            out += ',';
            out += csv::format_number(b(i, j));
            out += "\n";
        }
    }
    return out;
}

std::string reflections_csv(const ReflectionsTrace& trace, const SpecializationMatrix& sm) {
    std::string out = "kind,label";
    for (std::size_t k = 0; k < trace.country.size(); ++k) out += ",round" + std::to_string(k);
    out += "\n";
    for (std::size_t p = 0; p < sm.countries.size(); ++p) {
        out += "country," + sm.countries[p];
        for (const Vec& round : trace.country) {
            out += ',';
            out += csv::format_number(round[p]);
        }
        out += "\n";
    }
    for (std::size_t q = 0; q < sm.products.size(); ++q) {
        out += "product," + sm.products[q];
        for (const Vec& round : trace.product) {
            out += ',';
            out += csv::format_number(round[q]);
        }
        out += "\n";
    }
    return out;
}

void write_out(const RunConfig& cfg, const char* name, const std::string& bytes) {
    csv::write_file(fs::path(cfg.out_dir) / name, bytes);
}

RunReport base_report(const char* command, const RunConfig& cfg, const Pipeline& p) {
    RunReport r;
    r.command = command;
    r.inputs = p.digests;
    r.axes_requested = cfg.axes;
    r.pruned = p.sm.prune;
    return r;
}

} // namespace

int run_ca(const RunConfig& cfg) try {
    check_common(cfg, true);
    const Pipeline p = load_pipeline(cfg, false);
    const std::size_t available = p.sm.countries.size() - 1;

    RunReport report = base_report("ca", cfg, p);
    EquivalenceReport equivalence;

    if (cfg.method == "iterative") {
        const ReciprocalAveraging ra =
            reciprocal_averaging(p.sm, cfg.tol, cfg.max_iter, sign_of(cfg));
        const double trace = cooccurrence_trace(p.sm);
        report.axes_effective = 1;
        report.eigenvalues = {ra.lambda};
        report.inertia_shares = {ra.lambda / (trace - 1.0)};
        report.trace = trace;
        report.method.solver = "reciprocal_averaging";
        report.method.iterations = ra.iterations;
        report.method.residual = ra.residual;
        write_out(cfg, "eci.csv", axes_csv("country", p.sm.countries, column_matrix(ra.country_axis)));
        write_out(cfg, "pci.csv", axes_csv("product", p.sm.products, column_matrix(ra.product_axis)));
    } else {
        const std::size_t k = clamp_axes(cfg.axes, available);
        const CaResult ca = ca_eigen(p.sm, k, sign_of(cfg));
        report.axes_effective = k;
        report.eigenvalues = ca.eigenvalues;
        report.inertia_shares = ca.inertia_shares;
        report.trace = ca.trace;
        report.method = ca.method_meta;
        report.residuals = validate_ordination(ca, p.sm);
        write_out(cfg, "eci.csv", axes_csv("country", p.sm.countries, ca.country_axes));
        write_out(cfg, "pci.csv", axes_csv("product", p.sm.products, ca.product_axes));
        if (cfg.method == "both") {
            const ReciprocalAveraging ra =
                reciprocal_averaging(p.sm, cfg.tol, cfg.max_iter, sign_of(cfg));
            equivalence.correlations.push_back(
                std::abs(stats::weighted_correlation(ca.country_axes.col(0), ra.country_axis, p.sm.w)));
            equivalence.eigenvalue_gaps.push_back(std::abs(ca.eigenvalues[0] - ra.lambda));
            write_out(cfg, "equivalence.json", equivalence_json(equivalence));
        }
    }

    if (cfg.reflections > 0) {
        const ReflectionsTrace trace = method_of_reflections(p.sm, cfg.reflections);
        write_out(cfg, "reflections.csv", reflections_csv(trace, p.sm));
    }
    write_out(cfg, "report.json", report_json(report));
    return 0;
} catch (const Error& e) {
    return emit_error("ca", e);
} catch (const std::exception& e) {
    return emit_unexpected("ca", e);
}

int run_cca(const RunConfig& cfg) try {
    check_common(cfg, true);
    const Pipeline p = load_pipeline(cfg, true);
    const std::size_t z = p.env.names.size();
    if (p.sm.countries.size() < z + 1)
        fail(errc::degenerate, "need at least " + std::to_string(z + 1) + " countries for " +
                                   std::to_string(z) + " variables, have " +
                                   std::to_string(p.sm.countries.size()));
    const std::size_t k = clamp_axes(cfg.axes, z);

    RunReport report = base_report("cca", cfg, p);
    report.axes_effective = k;

    CcaResult primary;
    if (cfg.method == "iterative") {
        primary = cca_iterative(p.sm, p.env, k, cfg.tol, cfg.max_iter, sign_of(cfg));
    } else {
        primary = cca_eigen(p.sm, p.env, k, sign_of(cfg));
        if (cfg.method == "both") {
            const CcaResult it = cca_iterative(p.sm, p.env, k, cfg.tol, cfg.max_iter, sign_of(cfg));
            EquivalenceReport equivalence;
            for (std::size_t j = 0; j < k; ++j) {
                equivalence.correlations.push_back(std::abs(
                    stats::weighted_correlation(primary.e_std.col(j), it.e_std.col(j), p.sm.w)));
                equivalence.eigenvalue_gaps.push_back(std::abs(primary.lambda[j] - it.lambda[j]));
            }
            write_out(cfg, "equivalence.json", equivalence_json(equivalence));
        }
    }

    report.eigenvalues = primary.lambda;
    report.inertia_shares = primary.inertia_shares;
    report.trace = primary.trace;
    report.method = primary.method_meta;
    report.residuals = validate_ordination(primary, p.sm, p.env);

    write_out(cfg, "e_std.csv", axes_csv("country", p.sm.countries, primary.e_std));
    write_out(cfg, "u.csv", axes_csv("product", p.sm.products, primary.u));
    write_out(cfg, "v.csv", axes_csv("country", p.sm.countries, primary.v));
    write_out(cfg, "b.csv", coefficients_csv(p.env.names, primary.b));
    write_out(cfg, "report.json", report_json(report));
    return 0;
} catch (const Error& e) {
    return emit_error("cca", e);
} catch (const std::exception& e) {
    return emit_unexpected("cca", e);
}

int run_biplot(const RunConfig& cfg) try {
    check_common(cfg, true);
    if (cfg.axis_a < 1 || cfg.axis_b < 1) fail(errc::argument, "axis indices are 1-based");
    for (const auto& [axis, limit] : cfg.caps) {
        if (axis != cfg.axis_a && axis != cfg.axis_b)
            fail(errc::argument, "cap names axis " + std::to_string(axis) +
                                     " which is not in the displayed pair");
        if (limit <= 0.0) fail(errc::argument, "cap limits must be positive");
    }

    std::string ord = cfg.ordination;
    if (ord == "auto") ord = cfg.vars_path.empty() ? "ca" : "cca";
    if (ord == "cca" && cfg.vars_path.empty())
        fail(errc::argument, "cca ordination requires a country-variables input");

    const Pipeline p = load_pipeline(cfg, ord == "cca");

    std::size_t axis_a = cfg.axis_a;
    std::size_t axis_b = cfg.axis_b;
    const std::size_t wanted = std::max({cfg.axes, axis_a, axis_b});
    const std::size_t available = ord == "cca" ? p.env.names.size() : p.sm.countries.size() - 1;
    // A table with a single usable axis still renders: the default pair
    // degrades to the diagonal (1, 1) plot.
    if (available == 1 && axis_a == 1 && axis_b == 2) axis_b = 1;
    if (std::max(axis_a, axis_b) > available)
        fail(errc::argument, "axis pair (" + std::to_string(axis_a) + ", " + std::to_string(axis_b) +
                                 ") exceeds the " + std::to_string(available) + " available axes");
    const std::size_t k = clamp_axes(wanted, available);

    RunReport report = base_report("biplot", cfg, p);
    report.axes_effective = k;
    report.extra_strings.push_back({"ordination", ord});
    report.extra_counts.push_back({"axis_a", axis_a});
    report.extra_counts.push_back({"axis_b", axis_b});

    ScaledScores scores;
    Vec shares;
    VariableRays rays;
    bool have_rays = false;
    if (ord == "cca") {
        const std::size_t z = p.env.names.size();
        if (p.sm.countries.size() < z + 1)
            fail(errc::degenerate, "need at least " + std::to_string(z + 1) + " countries for " +
                                       std::to_string(z) + " variables, have " +
                                       std::to_string(p.sm.countries.size()));
        const CcaResult cca = cfg.method == "iterative"
                                  ? cca_iterative(p.sm, p.env, k, cfg.tol, cfg.max_iter, sign_of(cfg))
                                  : cca_eigen(p.sm, p.env, k, sign_of(cfg));
        scores = scale_type1(cca);
        shares = cca.inertia_shares;
        rays = intraclass_correlations(p.env, cca, p.sm);
        have_rays = true;
        report.eigenvalues = cca.lambda;
        report.trace = cca.trace;
        report.method = cca.method_meta;
    } else {
        const CaResult ca = ca_eigen(p.sm, k, sign_of(cfg));
        scores = scale_type1(ca);
        shares = ca.inertia_shares;
        if (p.has_vars) {
            rays = intraclass_correlations(p.env, ca, p.sm);
            have_rays = true;
        }
        report.eigenvalues = ca.eigenvalues;
        report.trace = ca.trace;
        report.method = ca.method_meta;
    }
    report.inertia_shares = shares;

    CentroidTable centroids;
    bool have_centroids = false;
    if (!cfg.lall_path.empty()) {
        const std::string lall_bytes = csv::read_file(cfg.lall_path);
        report.inputs["lall"] = csv::fnv1a_hex(lall_bytes);
        centroids = group_centroids(scores, p.sm, parse_lall_csv(lall_bytes));
        have_centroids = true;
        report.extra_lists.push_back({"unmapped_products", centroids.unmapped});
        report.extra_lists.push_back({"empty_groups", centroids.empty_groups});
    }

    BiplotOptions options;
    options.axis_a = axis_a;
    options.axis_b = axis_b;
    for (const auto& [axis, limit] : cfg.caps) {
        if (axis == axis_a) options.cap_a = limit;
        if (axis == axis_b) options.cap_b = limit;
    }
    options.ray_back_extension = cfg.ray_extension;
    options.axis_prefix = ord == "cca" ? "CCA" : "CA";

    const BiplotModel model =
        assemble_biplot(scores, p.sm, shares, have_rays ? &rays : nullptr,
                        have_centroids ? &centroids : nullptr, options);
    report.extra_lists.push_back({"clipped", model.clipped});

    write_out(cfg, "biplot.svg", render_svg(model));
    write_out(cfg, "biplot.csv", biplot_csv(model));
    write_out(cfg, "report.json", report_json(report));
    return 0;
} catch (const Error& e) {
    return emit_error("biplot", e);
} catch (const std::exception& e) {
    return emit_unexpected("biplot", e);
}

int run_validate(const RunConfig& cfg) try {
    check_common(cfg, true);
    if (cfg.validate_rel <= 0.0 || cfg.validate_norm <= 0.0)
        fail(errc::argument, "validation tolerances must be positive");

    std::string ord = cfg.ordination;
    if (ord == "auto") ord = cfg.vars_path.empty() ? "ca" : "cca";
    if (ord == "cca" && cfg.vars_path.empty())
        fail(errc::argument, "cca ordination requires a country-variables input");

    const Pipeline p = load_pipeline(cfg, ord == "cca");

    RunReport report = base_report("validate", cfg, p);
    report.extra_strings.push_back({"ordination", ord});

    OrthogonalityReport checks;
    if (ord == "cca") {
        const std::size_t z = p.env.names.size();
        if (p.sm.countries.size() < z + 1)
            fail(errc::degenerate, "need at least " + std::to_string(z + 1) + " countries for " +
                                       std::to_string(z) + " variables, have " +
                                       std::to_string(p.sm.countries.size()));
        const std::size_t k = clamp_axes(cfg.axes, z);
        const CcaResult cca = cca_eigen(p.sm, p.env, k, sign_of(cfg));
        checks = validate_ordination(cca, p.sm, p.env);
        report.axes_effective = k;
        report.eigenvalues = cca.lambda;
        report.inertia_shares = cca.inertia_shares;
        report.trace = cca.trace;
        report.method = cca.method_meta;
    } else {
        const std::size_t k = clamp_axes(cfg.axes, p.sm.countries.size() - 1);
        const CaResult ca = ca_eigen(p.sm, k, sign_of(cfg));
        checks = validate_ordination(ca, p.sm);
        report.axes_effective = k;
        report.eigenvalues = ca.eigenvalues;
        report.inertia_shares = ca.inertia_shares;
        report.trace = ca.trace;
        report.method = ca.method_meta;
    }

    // Re-judge the residuals against the tolerances this run asked for.
    checks.rel_tolerance = cfg.validate_rel;
    checks.norm_tolerance = cfg.validate_norm;
    checks.pass = true;
    for (const AxisResiduals& a : checks.axes)
        checks.pass = checks.pass && a.dv_rel <= checks.rel_tolerance &&
                      a.su_rel <= checks.rel_tolerance && a.de_rel <= checks.rel_tolerance &&
                      a.span_rel <= checks.rel_tolerance && a.wnorm <= checks.norm_tolerance;

    report.residuals = checks;
    report.extra_flags.push_back({"pass", checks.pass});
    report.extra_numbers.push_back({"rel_tolerance", checks.rel_tolerance});
    report.extra_numbers.push_back({"norm_tolerance", checks.norm_tolerance});
    write_out(cfg, "validation.json", report_json(report));
    return checks.pass ? 0 : exit_validation_failed;
} catch (const Error& e) {
    return emit_error("validate", e);
} catch (const std::exception& e) {
    return emit_unexpected("validate", e);
}

int run_synth(const RunConfig& cfg) try {
    check_common(cfg, false);
    SynthConfig sc;
    sc.countries = cfg.countries;
    sc.products = cfg.products;
    sc.num_vars = cfg.num_vars;
    sc.noise = cfg.noise;
    sc.var_noise = cfg.var_noise;
    sc.seed = cfg.seed;
    sc.year = cfg.year;
    const SynthResult s = synthesize(sc);

    RunReport report;
    report.command = "synth";
    report.extra_counts.push_back({"countries", s.sm.countries.size()});
    report.extra_counts.push_back({"products", s.sm.products.size()});
    report.extra_counts.push_back({"num_vars", cfg.num_vars});
    report.extra_counts.push_back({"seed", cfg.seed});
    report.extra_counts.push_back({"year", static_cast<std::uint64_t>(cfg.year)});
    report.extra_numbers.push_back({"noise", cfg.noise});
    report.extra_numbers.push_back({"var_noise", cfg.var_noise});
    report.extra_strings.push_back({"digest_trade", csv::fnv1a_hex(s.trade_csv)});
    report.extra_strings.push_back({"digest_vars", csv::fnv1a_hex(s.vars_csv)});
    report.extra_strings.push_back({"digest_truth", csv::fnv1a_hex(s.truth_csv)});

    write_out(cfg, "trade.csv", s.trade_csv);
    write_out(cfg, "vars.csv", s.vars_csv);
    write_out(cfg, "truth.csv", s.truth_csv);
    write_out(cfg, "report.json", report_json(report));
    return 0;
} catch (const Error& e) {
    return emit_error("synth", e);
} catch (const std::exception& e) {
    return emit_unexpected("synth", e);
}

} // namespace ecc
