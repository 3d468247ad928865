// Acceptance gate: one line per criterion, exit code = number of failures.
// Every check runs on deterministic seeds, so a pass is reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ecc/biplot.hpp"
#include "ecc/ca.hpp"
#include "ecc/cca.hpp"
#include "ecc/commands.hpp"
#include "ecc/csv.hpp"
#include "ecc/ingest.hpp"
#include "ecc/kernels.hpp"
#include "ecc/rng.hpp"
#include "ecc/stats.hpp"
#include "ecc/synth.hpp"

using namespace ecc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++failures;
}

void report_skip(int criterion, const std::string& detail) {
    std::printf("criterion %2d: SKIP  %s\n", criterion, detail.c_str());
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::vector<std::string> make_labels(std::size_t count, const char* prefix) {
    std::vector<std::string> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
        out[i] = buf;
    }
    return out;
}

// Random connected instance with a generic spectrum: all m-1 eigenvalues
// computable, none numerically zero, and no near-ties among the leading
// axes, so per-axis solver comparisons are well-posed. Ties and rank
// deficiency are measure-zero events the criteria do not cover; redraws
// keep the sample generic without touching any checked quantity.
struct Instance {
    SpecializationMatrix sm;
    CountryVariableTable env;
    VariableFile raw_vars;
    std::size_t z = 0;
    CaResult ca_full; // all m-1 axes
};

VariableFile random_vars(SplitMix64& rng, const SpecializationMatrix& sm, std::size_t z) {
    VariableFile vf;
    vf.names = make_labels(z, "v");
    for (const std::string& country : sm.countries) {
        VariableFile::Entry e;
        e.country = country;
        e.values.resize(z);
        for (std::size_t i = 0; i < z; ++i) e.values[i] = rng.unit();
        e.present.assign(z, true);
        vf.entries.push_back(std::move(e));
    }
    return vf;
}

Instance random_instance(std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (int attempt = 0; attempt < 500; ++attempt) {
        const std::size_t m = 4 + rng.next() % 17; // 4..20 countries
        const std::size_t n = 6 + rng.next() % 25; // 6..30 products
        const double density = 0.2 + 0.4 * rng.unit();
        Matrix x(n, m);
        for (std::size_t q = 0; q < n; ++q)
            for (std::size_t p = 0; p < m; ++p) x(q, p) = rng.unit() < density ? 1.0 : 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            double row = 0.0;
            for (std::size_t p = 0; p < m; ++p) row += x(q, p);
            if (row == 0.0) x(q, rng.next() % m) = 1.0;
        }
        for (std::size_t p = 0; p < m; ++p) {
            double col = 0.0;
            for (std::size_t q = 0; q < n; ++q) col += x(q, p);
            if (col == 0.0) x(rng.next() % n, p) = 1.0;
        }

        Instance inst;
        try {
            inst.sm = make_specialization_from_binary(make_labels(n, "P"), make_labels(m, "C"),
                                                      std::move(x));
            if (bipartite_components(inst.sm).count != 1) continue;
            inst.ca_full = ca_eigen(inst.sm, m - 1);
        } catch (const Error&) {
            continue;
        }
        bool generic = inst.ca_full.eigenvalues.back() > 1e-12;
        for (std::size_t j = 0; j + 1 < inst.ca_full.eigenvalues.size() && generic; ++j)
            generic = inst.ca_full.eigenvalues[j] - inst.ca_full.eigenvalues[j + 1] > 1e-4;
        if (!generic) continue;

        inst.z = 1 + rng.next() % std::min<std::size_t>(5, m - 2);
        bool env_ok = false;
        for (int draw = 0; draw < 50 && !env_ok; ++draw) {
            try {
                inst.raw_vars = random_vars(rng, inst.sm, inst.z);
                inst.env = standardize_environment(inst.raw_vars, inst.sm);
                env_ok = true;
            } catch (const Error&) {
            }
        }
        if (env_ok) return inst;
    }
    std::fprintf(stderr, "could not draw a generic connected instance for seed %llu\n",
                 static_cast<unsigned long long>(seed));
    std::exit(2);
}

double max_abs(const Vec& v) {
    double out = 0.0;
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

// max |a - b| allowing a global sign flip of a
double match_up_to_sign(const Vec& a, const Vec& b) {
    double direct = 0.0, flipped = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        direct = std::max(direct, std::abs(a[i] - b[i]));
        flipped = std::max(flipped, std::abs(a[i] + b[i]));
    }
    return std::min(direct, flipped);
}

bool dirs_equal(const fs::path& a, const fs::path& b, std::string& why) {
    std::vector<fs::path> names;
    for (const auto& entry : fs::directory_iterator(a)) names.push_back(entry.path().filename());
    std::sort(names.begin(), names.end());
    for (const fs::path& name : names) {
        if (!fs::exists(b / name)) {
            why = name.string() + " missing from second run";
            return false;
        }
        if (csv::read_file(a / name) != csv::read_file(b / name)) {
            why = name.string() + " differs between runs";
            return false;
        }
    }
    return true;
}

} // namespace

int main() {
    const std::size_t instance_count = 100;
    std::vector<Instance> instances;
    instances.reserve(instance_count);

    // ---- criterion 1: trivial eigenpair of C^c and Phi on 100 instances
    {
        const double t0 = now_seconds();
        double worst = 0.0;
        for (std::size_t i = 0; i < instance_count; ++i)
            instances.push_back(random_instance(0xacce57ull + i));
        for (const Instance& inst : instances) {
            const Matrix cc = cooccurrence_country(inst.sm);
            const std::size_t m = inst.sm.countries.size();
            const Vec ones(m, 1.0);
            Vec cc1 = kernels::multiply_vec(cc, ones);
            for (double& v : cc1) v -= 1.0;
            worst = std::max(worst, max_abs(cc1));

            const EnvironmentOperator op = regression_operator(inst.env, inst.sm);
            const Matrix h = kernels::multiply(inst.env.y, op.t);
            Vec phi1 = kernels::multiply_vec(h, kernels::multiply_vec(cc, ones));
            for (double& v : phi1) v -= 1.0;
            worst = std::max(worst, max_abs(phi1));
        }
        const double elapsed = now_seconds() - t0;
        char detail[160];
        std::snprintf(detail, sizeof detail,
                      "constant eigenvector residual %.2e on %zu instances in %.2fs", worst,
                      instance_count, elapsed);
        report(1, worst <= 1e-10 && elapsed < 5.0, detail);
    }

    // ---- criterion 2: orthogonality residuals of every axis
    {
        double worst = 0.0;
        for (const Instance& inst : instances) {
            const OrthogonalityReport ca_checks = validate_ordination(inst.ca_full, inst.sm);
            for (const AxisResiduals& r : ca_checks.axes)
                worst = std::max({worst, r.dv_rel, r.su_rel, r.de_rel});
            const std::size_t k = std::min<std::size_t>(2, inst.z);
            const CcaResult cca = cca_eigen(inst.sm, inst.env, k);
            const OrthogonalityReport cca_checks = validate_ordination(cca, inst.sm, inst.env);
            for (const AxisResiduals& r : cca_checks.axes)
                worst = std::max({worst, r.dv_rel, r.su_rel, r.de_rel});
        }
        char detail[120];
        std::snprintf(detail, sizeof detail, "max relative residual %.2e", worst);
        report(2, worst <= 1e-8, detail);
    }

    // ---- criterion 3: eigen and iterative CCA agree per axis
    {
        double worst_corr = 1.0, worst_gap = 0.0;
        for (const Instance& inst : instances) {
            const std::size_t k = std::min<std::size_t>(2, inst.z);
            const CcaResult eig = cca_eigen(inst.sm, inst.env, k);
            const CcaResult it = cca_iterative(inst.sm, inst.env, k);
            for (std::size_t j = 0; j < k; ++j) {
                const double corr = std::abs(
                    stats::weighted_correlation(eig.e_std.col(j), it.e_std.col(j), inst.sm.w));
                worst_corr = std::min(worst_corr, corr);
                worst_gap = std::max(worst_gap, std::abs(eig.lambda[j] - it.lambda[j]));
            }
        }
        char detail[120];
        std::snprintf(detail, sizeof detail, "min |wcorr| %.12f, max eigenvalue gap %.2e",
                      worst_corr, worst_gap);
        report(3, worst_corr >= 1.0 - 1e-6 && worst_gap <= 1e-6, detail);
    }

    // ---- criterion 4: reciprocal averaging finds the leading CA axis
    {
        double worst = 1.0;
        for (const Instance& inst : instances) {
            const ReciprocalAveraging ra = reciprocal_averaging(inst.sm);
            const double corr = std::abs(stats::weighted_correlation(
                inst.ca_full.country_axes.col(0), ra.country_axis, inst.sm.w));
            worst = std::min(worst, corr);
        }
        char detail[120];
        std::snprintf(detail, sizeof detail, "min |wcorr| with the leading axis %.14f", worst);
        report(4, worst >= 1.0 - 1e-8, detail);
    }

    // ---- criterion 5: the 2x2 fixture, exact to closed form
    {
        Matrix x(2, 2);
        x(0, 0) = 1.0;
        x(0, 1) = 1.0;
        x(1, 1) = 1.0;
        const SpecializationMatrix sm =
            make_specialization_from_binary({"q1", "q2"}, {"c1", "c2"}, std::move(x));
        const CaResult ca = ca_eigen(sm, 1);
        const double lambda_err = std::abs(ca.eigenvalues[0] - 0.25);
        const double share_err = std::abs(ca.inertia_shares[0] - 1.0);
        const double eci_err =
            match_up_to_sign(ca.country_axes.col(0), {1.41421356237310, -0.70710678118655});
        const double pci_err =
            match_up_to_sign(ca.product_axes.col(0), {0.35355339059327, -0.70710678118655});
        const double chi2 = chi2_distance(sm, 0, 1);
        const double chi2_err = std::abs(chi2 - 1.06066017177982);
        const ScaledScores scaled = scale_type1(ca);
        const double coord_dist = std::abs(scaled.v_hat(0, 0) - scaled.v_hat(1, 0));
        const double coord_err = std::abs(coord_dist - chi2);
        const bool pass = lambda_err <= 1e-12 && share_err <= 1e-12 && eci_err <= 1e-8 &&
                          pci_err <= 1e-8 && chi2_err <= 1e-8 && coord_err <= 1e-8;
        char detail[200];
        std::snprintf(detail, sizeof detail,
                      "lambda err %.1e, eci err %.1e, pci err %.1e, chi2 err %.1e, coord err %.1e",
                      lambda_err, eci_err, pci_err, chi2_err, coord_err);
        report(5, pass, detail);
    }

    // ---- criterion 6: saturated CCA equals CA; fewer variables interlace
    {
        double worst_eq = 0.0, worst_excess = -1.0;
        bool ok = true;
        for (std::size_t i = 0; i < 20 && ok; ++i) {
            const Instance& inst = instances[i];
            SplitMix64 rng(0x5a7ull + i);
            const std::size_t m = inst.sm.countries.size();
            try {
                const CountryVariableTable full =
                    standardize_environment(random_vars(rng, inst.sm, m - 1), inst.sm);
                const CcaResult saturated = cca_eigen(inst.sm, full, m - 1);
                for (std::size_t j = 0; j < m - 1; ++j)
                    worst_eq = std::max(
                        worst_eq, std::abs(saturated.lambda[j] - inst.ca_full.eigenvalues[j]));

                const std::size_t z2 = std::max<std::size_t>(1, (m - 1) / 2);
                const CountryVariableTable half =
                    standardize_environment(random_vars(rng, inst.sm, z2), inst.sm);
                const CcaResult constrained = cca_eigen(inst.sm, half, z2);
                for (std::size_t j = 0; j < z2; ++j)
                    worst_excess = std::max(worst_excess, constrained.lambda[j] -
                                                              inst.ca_full.eigenvalues[j]);
            } catch (const Error& e) {
                ok = false;
                report(6, false, std::string("instance failed: ") + e.what());
            }
        }
        if (ok) {
            char detail[160];
            std::snprintf(detail, sizeof detail,
                          "saturated gap %.2e, max interlacing excess %.2e over 20 instances",
                          worst_eq, worst_excess);
            report(6, worst_eq <= 1e-8 && worst_excess <= 1e-10, detail);
        }
    }

    // ---- criterion 7: the non-trivial eigenvalues exhaust the inertia
    {
        double worst = 0.0;
        for (const Instance& inst : instances) {
            double sum = 0.0;
            for (double l : inst.ca_full.eigenvalues) sum += l;
            worst = std::max(worst, std::abs(sum - (inst.ca_full.trace - 1.0)));
        }
        char detail[120];
        std::snprintf(detail, sizeof detail, "max |sum(lambda) - (trace - 1)| = %.2e", worst);
        report(7, worst <= 1e-10, detail);
    }

    // ---- criterion 8: biplot identities
    {
        double barycenter = 0.0, origin = 0.0, a_excess = 0.0;
        bool singleton_exact = true;
        for (std::size_t i = 0; i < 20; ++i) {
            const Instance& inst = instances[i];
            const std::size_t k = std::min<std::size_t>(3, inst.sm.countries.size() - 1);
            const CaResult ca = ca_eigen(inst.sm, k);
            const ScaledScores scaled = scale_type1(ca);
            const Matrix expected = kernels::multiply_at_b(inst.sm.xd, scaled.u_hat);
            for (std::size_t p = 0; p < expected.rows(); ++p)
                for (std::size_t j = 0; j < expected.cols(); ++j)
                    barycenter =
                        std::max(barycenter, std::abs(expected(p, j) - scaled.v_hat(p, j)));

            for (std::size_t j = 0; j < k; ++j) {
                const Vec vj = scaled.v_hat.col(j);
                const Vec uj = scaled.u_hat.col(j);
                double dv = 0.0, su = 0.0, dn = 0.0, sn = 0.0;
                for (std::size_t p = 0; p < vj.size(); ++p) {
                    dv += inst.sm.diversity[p] * vj[p];
                    dn += std::abs(inst.sm.diversity[p] * vj[p]);
                }
                for (std::size_t q = 0; q < uj.size(); ++q) {
                    su += inst.sm.ubiquity[q] * uj[q];
                    sn += std::abs(inst.sm.ubiquity[q] * uj[q]);
                }
                origin = std::max(origin, std::abs(dv) / std::max(dn, 1e-300));
                origin = std::max(origin, std::abs(su) / std::max(sn, 1e-300));
            }

            const VariableRays rays = intraclass_correlations(inst.env, ca, inst.sm);
            for (std::size_t vi = 0; vi < rays.a.rows(); ++vi)
                for (std::size_t j = 0; j < rays.a.cols(); ++j)
                    a_excess = std::max(a_excess, std::abs(rays.a(vi, j)) - 1.0);

            std::vector<std::pair<std::string, std::string>> mapping;
            for (std::size_t q = 0; q < inst.sm.products.size(); ++q)
                mapping.push_back({inst.sm.products[q], q == 0 ? "HTe" : "PPm"});
            const CentroidTable centroids = group_centroids(scaled, inst.sm, mapping);
            for (const Centroid& c : centroids.rows) {
                if (c.group != "HTe") continue;
                for (std::size_t j = 0; j < k; ++j)
                    singleton_exact = singleton_exact && c.coords[j] == scaled.u_hat(0, j);
            }
        }
        char detail[200];
        std::snprintf(detail, sizeof detail,
                      "barycenter err %.2e, origin residual %.2e, |A|-1 excess %.2e, singleton %s",
                      barycenter, origin, a_excess, singleton_exact ? "exact" : "DIFFERS");
        report(8, barycenter <= 1e-12 && origin <= 1e-10 && a_excess <= 1e-10 && singleton_exact,
               detail);
    }

    // ---- criterion 9: the planted gradient is recovered at full size
    {
        const double t0 = now_seconds();
        SynthConfig sc;
        sc.countries = 50;
        sc.products = 200;
        sc.num_vars = 1;
        sc.noise = 0.0;
        sc.var_noise = 0.0;
        sc.seed = 33;
        const SynthResult s = synthesize(sc);
        const CaResult ca = ca_eigen(s.sm, 1);
        const double rho = std::abs(stats::spearman(ca.country_axes.col(0), s.ability));
        const CountryVariableTable env =
            standardize_environment(parse_variables_csv(s.vars_csv), s.sm);
        const CcaResult cca = cca_eigen(s.sm, env, 1);
        const VariableRays rays = intraclass_correlations(env, cca, s.sm);
        const double a11 = std::abs(rays.a(0, 0));
        const double elapsed = now_seconds() - t0;
        char detail[160];
        std::snprintf(detail, sizeof detail, "|spearman| %.4f, |A_11| %.4f in %.2fs", rho, a11,
                      elapsed);
        report(9, rho >= 0.9 && a11 >= 0.99 && elapsed < 10.0, detail);
    }

    // ---- criterion 10: every command is byte-deterministic
    {
        const fs::path base = fs::temp_directory_path() / "ecc_acceptance";
        fs::remove_all(base);
        fs::create_directories(base);

        bool pass = true;
        std::string why;
        RunConfig gen;
        gen.seed = 7;
        gen.countries = 12;
        gen.products = 40;
        gen.num_vars = 2;
        gen.var_noise = 0.1;
        for (const char* run : {"a", "b"}) {
            gen.out_dir = (base / "synth" / run).string();
            if (run_synth(gen) != 0) {
                pass = false;
                why = "synth run failed";
            }
        }
        pass = pass && dirs_equal(base / "synth" / "a", base / "synth" / "b", why);

        const std::string trade = (base / "synth" / "a" / "trade.csv").string();
        const std::string vars = (base / "synth" / "a" / "vars.csv").string();
        std::string lall = "product,category\n";
        for (std::size_t q = 0; q < 40; ++q) {
            char label[8];
            std::snprintf(label, sizeof label, "P%04zu", q);
            lall += std::string(label) + "," + lall_categories[q % lall_categories.size()] + "\n";
        }
        csv::write_file(base / "lall.csv", lall);

        RunConfig ca_cfg;
        ca_cfg.trade_path = trade;
        ca_cfg.method = "both";
        ca_cfg.reflections = 3;
        RunConfig cca_cfg;
        cca_cfg.trade_path = trade;
        cca_cfg.vars_path = vars;
        cca_cfg.method = "both";
        RunConfig bp_cfg;
        bp_cfg.trade_path = trade;
        bp_cfg.vars_path = vars;
        bp_cfg.lall_path = (base / "lall.csv").string();
        bp_cfg.caps.push_back({1, 2.5});
        RunConfig val_cfg;
        val_cfg.trade_path = trade;
        val_cfg.vars_path = vars;

        const std::vector<std::pair<const char*, int (*)(const RunConfig&)>> commands = {
            {"ca", run_ca}, {"cca", run_cca}, {"biplot", run_biplot}, {"validate", run_validate}};
        std::vector<RunConfig> configs = {ca_cfg, cca_cfg, bp_cfg, val_cfg};
        for (std::size_t c = 0; c < commands.size() && pass; ++c) {
            for (const char* run : {"a", "b"}) {
                configs[c].out_dir = (base / commands[c].first / run).string();
                if (commands[c].second(configs[c]) != 0) {
                    pass = false;
                    why = std::string(commands[c].first) + " run failed";
                }
            }
            pass = pass &&
                   dirs_equal(base / commands[c].first / "a", base / commands[c].first / "b", why);
        }
        report(10, pass, pass ? "synth, ca, cca, biplot, validate all byte-identical on rerun"
                              : why);
    }

    // ---- criterion 11: real trade data, when provided
    {
        const char* trade_path = std::getenv("ECC_REAL_TRADE");
        const char* vars_path = std::getenv("ECC_REAL_VARS");
        if (trade_path == nullptr) {
            report_skip(11, "set ECC_REAL_TRADE (and optionally ECC_REAL_VARS) to run");
        } else {
            try {
                const double t0 = now_seconds();
                const TradeTable t = parse_trade_csv(csv::read_file(trade_path));
                SpecializationMatrix sm = binarize(compute_rca(t));
                if (bipartite_components(sm).count > 1) sm = restrict_to_largest_component(sm);
                const CaResult ca = ca_eigen(sm, 1);
                const double share = ca.inertia_shares[0];
                bool pass = share >= 0.031 && share <= 0.051;
                double corr = 0.0;
                if (vars_path != nullptr) {
                    const CountryVariableTable env =
                        standardize_environment(parse_variables_csv(csv::read_file(vars_path)), sm);
                    const CcaResult cca = cca_eigen(sm, env, 1);
                    corr = std::abs(stats::weighted_correlation(cca.e_std.col(0),
                                                                ca.country_axes.col(0), sm.w));
                    pass = pass && corr >= 0.9;
                }
                const double elapsed = now_seconds() - t0;
                pass = pass && elapsed < 60.0;
                char detail[160];
                std::snprintf(detail, sizeof detail,
                              "leading share %.4f, |wcorr(CCA-1, ECI)| %.4f in %.1fs", share, corr,
                              elapsed);
                report(11, pass, detail);
            } catch (const Error& e) {
                report(11, false, std::string("real-data run failed: ") + e.what());
            }
        }
    }

    return failures;
}
