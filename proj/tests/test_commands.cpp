#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "ecc/commands.hpp"
#include "ecc/csv.hpp"
#include "ecc/stats.hpp"
#include "ecc/synth.hpp"

using namespace ecc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ecc_commands" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return csv::read_file(p); }

// Rows of a label,axis1,... file as label -> first axis value.
std::map<std::string, double> first_axis(const std::string& bytes) {
    const csv::Table t = csv::parse(bytes);
    std::map<std::string, double> out;
    for (const csv::Row& row : t.rows) {
        bool ok = false;
        out[row.fields[0]] = csv::parse_number(row.fields[1], ok);
        REQUIRE(ok);
    }
    return out;
}

// The 2x2 fixture becomes X = [[1,1],[0,1]] at threshold 0.7: RCA values are
// 1.5, 0.75, 0 and 1.5, so the default threshold 1 would drop the 0.75 cell.
const char* f1_trade = "year,country,product,value\n"
                       "2018,c1,q1,1\n"
                       "2018,c2,q1,1\n"
                       "2018,c2,q2,1\n";

const char* f1_vars = "country,gdp\nc1,1\nc2,2\n";

RunConfig f1_config(const fs::path& dir) {
    csv::write_file(dir / "trade.csv", f1_trade);
    RunConfig cfg;
    cfg.trade_path = (dir / "trade.csv").string();
    cfg.out_dir = (dir / "out").string();
    cfg.rca_threshold = 0.7;
    return cfg;
}

// Small planted dataset written to dir; returns the shared RunConfig.
// Extra variables are linear in ability, so without variable noise any
// num_vars > 1 table would be exactly collinear.
RunConfig synth_config(const fs::path& dir, std::uint64_t seed, std::size_t countries,
                       std::size_t products, std::size_t num_vars = 1, double noise = 0.0) {
    RunConfig cfg;
    cfg.out_dir = dir.string();
    cfg.seed = seed;
    cfg.countries = countries;
    cfg.products = products;
    cfg.num_vars = num_vars;
    cfg.noise = noise;
    cfg.var_noise = num_vars > 1 ? 0.1 : 0.0;
    REQUIRE(run_synth(cfg) == 0);
    RunConfig next;
    next.trade_path = (dir / "trade.csv").string();
    next.vars_path = (dir / "vars.csv").string();
    next.out_dir = (dir / "out").string();
    return next;
}

} // namespace

TEST_CASE("ca writes scores and a faithful report for the 2x2 fixture") {
    const fs::path dir = fresh_dir("ca_f1");
    RunConfig cfg = f1_config(dir);
    cfg.axes = 2; // only one non-trivial axis exists; must clamp, not fail
    CHECK(run_ca(cfg) == 0);

    const auto eci = first_axis(slurp(dir / "out" / "eci.csv"));
    CHECK(eci.at("c1") == doctest::Approx(-1.41421356237).epsilon(1e-9));
    CHECK(eci.at("c2") == doctest::Approx(0.707106781187).epsilon(1e-9));
    const auto pci = first_axis(slurp(dir / "out" / "pci.csv"));
    CHECK(pci.at("q1") == doctest::Approx(-0.353553390593).epsilon(1e-9));
    CHECK(pci.at("q2") == doctest::Approx(0.707106781187).epsilon(1e-9));

    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["eigenvalues"].size() == 1);
    CHECK(report["eigenvalues"][0].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(report["inertia_shares"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report["trace"].get<double>() == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(report["axes"]["requested"] == 2);
    CHECK(report["axes"]["effective"] == 1);
    CHECK(report["version"] == "ecc 0.1.0");
    CHECK(report["solver"] == "jacobi");
    CHECK(report["pruned"]["countries"].empty());
    CHECK(report["residuals"].size() == 1);
    CHECK(report["residuals"][0]["dv_rel"].get<double>() <= 1e-10);
    CHECK(report["inputs"].contains("trade"));
}

TEST_CASE("ca reruns are byte-identical and method both writes an equivalence report") {
    const fs::path dir = fresh_dir("ca_rerun");
    RunConfig cfg = f1_config(dir);
    cfg.axes = 1;
    cfg.method = "both";
    cfg.reflections = 3;
    CHECK(run_ca(cfg) == 0);
    const std::string eci = slurp(dir / "out" / "eci.csv");
    const std::string report = slurp(dir / "out" / "report.json");
    const std::string equivalence = slurp(dir / "out" / "equivalence.json");
    const std::string reflections = slurp(dir / "out" / "reflections.csv");

    cfg.out_dir = (dir / "out2").string();
    CHECK(run_ca(cfg) == 0);
    CHECK(slurp(dir / "out2" / "eci.csv") == eci);
    CHECK(slurp(dir / "out2" / "report.json") == report);
    CHECK(slurp(dir / "out2" / "equivalence.json") == equivalence);
    CHECK(slurp(dir / "out2" / "reflections.csv") == reflections);

    const json eq = json::parse(equivalence);
    CHECK(eq["min_correlation"].get<double>() >= 1.0 - 1e-9);
    CHECK(eq["max_eigenvalue_gap"].get<double>() <= 1e-9);

    // round0 of the reflections dump is diversity / ubiquity verbatim
    const csv::Table refl = csv::parse(reflections);
    REQUIRE(refl.header.size() == 6); // kind,label,round0..round3
    bool ok = false;
    CHECK(refl.rows[0].fields[0] == "country");
    CHECK(csv::parse_number(refl.rows[0].fields[2], ok) == doctest::Approx(1.0)); // d(c1)
}

TEST_CASE("bad inputs and bad arguments map to their exit codes") {
    const fs::path dir = fresh_dir("ca_errors");
    RunConfig cfg;
    cfg.out_dir = (dir / "out").string();

    cfg.trade_path = (dir / "missing.csv").string();
    CHECK(run_ca(cfg) == 2); // input

    csv::write_file(dir / "bad_header.csv", "year,country,value\n2018,c1,1\n");
    cfg.trade_path = (dir / "bad_header.csv").string();
    CHECK(run_ca(cfg) == 3); // parse

    csv::write_file(dir / "negative.csv", "year,country,product,value\n2018,c1,q1,-2\n");
    cfg.trade_path = (dir / "negative.csv").string();
    CHECK(run_ca(cfg) == 4); // domain

    RunConfig bad = f1_config(dir);
    bad.axes = 0;
    CHECK(run_ca(bad) == 1); // argument
    bad = f1_config(dir);
    bad.tol = -1.0;
    CHECK(run_ca(bad) == 1);
    bad = f1_config(dir);
    bad.method = "magic";
    CHECK(run_ca(bad) == 1);
    bad = f1_config(dir);
    bad.trade_path.clear();
    CHECK(run_ca(bad) == 1);
}

TEST_CASE("disconnected tables fail unless folded to the largest component") {
    const fs::path dir = fresh_dir("ca_disconnected");
    // two copies of the 2x2 fixture on disjoint labels; a uniform block
    // would fold into a zero-eigenvalue table, this one keeps lambda = 0.25
    const std::string trade = "year,country,product,value\n"
                              "2018,c1,q1,1\n"
                              "2018,c2,q1,1\n"
                              "2018,c2,q2,1\n"
                              "2018,c3,q3,1\n"
                              "2018,c4,q3,1\n"
                              "2018,c4,q4,1\n";
    csv::write_file(dir / "trade.csv", trade);

    RunConfig cfg;
    cfg.trade_path = (dir / "trade.csv").string();
    cfg.out_dir = (dir / "out").string();
    cfg.axes = 1;
    cfg.rca_threshold = 0.7;
    CHECK(run_ca(cfg) == 6); // disconnected

    cfg.largest_component = true;
    CHECK(run_ca(cfg) == 0);
    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["pruned"]["countries"].size() == 2);
    bool saw_reason = false;
    for (const auto& pair : report["pruned"]["reasons"])
        saw_reason = saw_reason || pair[1] == "outside_largest_component";
    CHECK(saw_reason);
}

TEST_CASE("cca on the saturated 2x2 fixture reproduces the correspondence axis") {
    const fs::path dir = fresh_dir("cca_f1");
    RunConfig cfg = f1_config(dir);
    csv::write_file(dir / "vars.csv", f1_vars);
    cfg.vars_path = (dir / "vars.csv").string();
    cfg.axes = 1;
    cfg.method = "both";
    CHECK(run_cca(cfg) == 0);

    CHECK(run_ca(f1_config(dir)) == 0); // writes eci.csv next to it
    const auto eci = first_axis(slurp(dir / "out" / "eci.csv"));
    const auto e_std = first_axis(slurp(dir / "out" / "e_std.csv"));
    // with m = z+1 the hat operator is the identity, so the axes agree
    const double flip = e_std.at("c1") * eci.at("c1") < 0 ? -1.0 : 1.0;
    CHECK(flip * e_std.at("c1") == doctest::Approx(eci.at("c1")).epsilon(1e-9));
    CHECK(flip * e_std.at("c2") == doctest::Approx(eci.at("c2")).epsilon(1e-9));

    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["eigenvalues"][0].get<double>() == doctest::Approx(0.25).epsilon(1e-10));
    const json eq = json::parse(slurp(dir / "out" / "equivalence.json"));
    CHECK(eq["min_correlation"].get<double>() >= 1.0 - 1e-6);
    CHECK(eq["max_eigenvalue_gap"].get<double>() <= 1e-6);

    // long-form coefficients, intercept rows last
    const csv::Table b = csv::parse(slurp(dir / "out" / "b.csv"));
    REQUIRE(b.header == std::vector<std::string>{"variable", "axis", "coefficient"});
    CHECK(b.rows.front().fields[0] == "gdp");
    CHECK(b.rows.back().fields[0] == "(intercept)");
}

TEST_CASE("countries with incomplete variable rows are dropped before binarization") {
    const fs::path dir = fresh_dir("cca_incomplete");
    RunConfig cfg = synth_config(dir, 21, 8, 24);

    // blank one country's value: that row is incomplete, the country must go
    const csv::Table vars = csv::parse(slurp(dir / "vars.csv"));
    std::string doctored = "country,ability\n";
    std::string victim;
    for (const csv::Row& row : vars.rows) {
        if (victim.empty()) {
            victim = row.fields[0];
            doctored += row.fields[0] + ",\n";
        } else {
            doctored += row.fields[0] + "," + row.fields[1] + "\n";
        }
    }
    csv::write_file(dir / "vars_doctored.csv", doctored);
    cfg.vars_path = (dir / "vars_doctored.csv").string();
    cfg.axes = 1;
    CHECK(run_cca(cfg) == 0);

    const json report = json::parse(slurp(dir / "out" / "report.json"));
    bool dropped = false;
    for (const auto& c : report["pruned"]["countries"]) dropped = dropped || c == victim;
    CHECK(dropped);
    bool reason = false;
    for (const auto& pair : report["pruned"]["reasons"])
        reason = reason || (pair[0] == "country:" + victim && pair[1] == "no_complete_variable_row");
    CHECK(reason);
    const auto e_std = first_axis(slurp(dir / "out" / "e_std.csv"));
    CHECK(e_std.size() == 7);
    CHECK(e_std.find(victim) == e_std.end());
}

TEST_CASE("cca axis count follows the request up to the variable count") {
    const fs::path dir = fresh_dir("cca_axes");
    RunConfig cfg = synth_config(dir, 5, 12, 30, 5);
    cfg.axes = 3;
    CHECK(run_cca(cfg) == 0);
    const csv::Table e_std = csv::parse(slurp(dir / "out" / "e_std.csv"));
    CHECK(e_std.header == std::vector<std::string>{"country", "axis1", "axis2", "axis3"});
    const csv::Table b = csv::parse(slurp(dir / "out" / "b.csv"));
    CHECK(b.rows.size() == 6 * 3); // 5 variables + intercept, 3 axes each
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(b.rows[b.rows.size() - 1 - i].fields[0] == "(intercept)");

    cfg.axes = 9; // more than z = 5: clamp and say so
    cfg.out_dir = (dir / "out_clamped").string();
    CHECK(run_cca(cfg) == 0);
    const json report = json::parse(slurp(dir / "out_clamped" / "report.json"));
    CHECK(report["axes"]["requested"] == 9);
    CHECK(report["axes"]["effective"] == 5);
    CHECK(report["eigenvalues"].size() == 5);
}

TEST_CASE("collinear variables and starved iteration budgets have their own exits") {
    const fs::path dir = fresh_dir("cca_degens");
    RunConfig cfg = synth_config(dir, 3, 10, 30);

    const csv::Table vars = csv::parse(slurp(dir / "vars.csv"));
    std::string twin = "country,a,b\n";
    for (const csv::Row& row : vars.rows)
        twin += row.fields[0] + "," + row.fields[1] + "," + row.fields[1] + "\n";
    csv::write_file(dir / "vars_twin.csv", twin);
    RunConfig collinear = cfg;
    collinear.vars_path = (dir / "vars_twin.csv").string();
    CHECK(run_cca(collinear) == 7);

    RunConfig starved = cfg;
    starved.method = "iterative";
    starved.max_iter = 1;
    starved.axes = 1;
    CHECK(run_cca(starved) == 8);
}

TEST_CASE("biplot renders deterministic svg and csv") {
    const fs::path dir = fresh_dir("biplot_basic");
    RunConfig cfg = synth_config(dir, 7, 12, 40, 2);
    cfg.caps.push_back({1, 3.0});
    CHECK(run_biplot(cfg) == 0);

    const std::string svg = slurp(dir / "out" / "biplot.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("CCA-1 (") != std::string::npos); // vars present: auto picks cca
    CHECK(svg.find("CCA-2 (") != std::string::npos);
    const csv::Table coords = csv::parse(slurp(dir / "out" / "biplot.csv"));
    CHECK(coords.header ==
          std::vector<std::string>{"entity", "kind", "axis_a", "axis_b", "size", "group"});

    cfg.out_dir = (dir / "out2").string();
    CHECK(run_biplot(cfg) == 0);
    CHECK(slurp(dir / "out2" / "biplot.svg") == svg);
    CHECK(slurp(dir / "out2" / "biplot.csv") == slurp(dir / "out" / "biplot.csv"));
}

TEST_CASE("biplot axis pair selection can drop the leading axis") {
    const fs::path dir = fresh_dir("biplot_pair");
    RunConfig cfg = synth_config(dir, 5, 12, 30, 5);
    cfg.axis_a = 2;
    cfg.axis_b = 3;
    CHECK(run_biplot(cfg) == 0);
    const std::string svg = slurp(dir / "out" / "biplot.svg");
    CHECK(svg.find("CCA-2 (") != std::string::npos);
    CHECK(svg.find("CCA-3 (") != std::string::npos);
    CHECK(svg.find("CCA-1 (") == std::string::npos);
    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["axis_a"] == 2);
    CHECK(report["axis_b"] == 3);

    RunConfig bad = cfg;
    bad.axis_b = 9; // beyond z = 5
    CHECK(run_biplot(bad) == 1);
    bad = cfg;
    bad.caps.push_back({1, 2.0}); // axis 1 is not displayed
    CHECK(run_biplot(bad) == 1);
}

TEST_CASE("biplot folds products into category centroids when a mapping is given") {
    const fs::path dir = fresh_dir("biplot_lall");
    RunConfig cfg = synth_config(dir, 7, 12, 40, 2);

    const std::array<const char*, 11> cats = {"PPm", "PPo", "RBa", "RBo", "LTt", "LTo",
                                              "MTa", "MTp", "MTe", "HTe", "HTo"};
    std::string lall = "product,category\n";
    for (std::size_t q = 0; q < 40; ++q) {
        char label[8];
        std::snprintf(label, sizeof label, "P%04zu", q);
        lall += std::string(label) + "," + cats[q % cats.size()] + "\n";
    }
    csv::write_file(dir / "lall.csv", lall);
    cfg.lall_path = (dir / "lall.csv").string();
    CHECK(run_biplot(cfg) == 0);

    const csv::Table coords = csv::parse(slurp(dir / "out" / "biplot.csv"));
    std::size_t centroids = 0, products = 0;
    for (const csv::Row& row : coords.rows) {
        if (row.fields[1] == "centroid") ++centroids;
        if (row.fields[1] == "product") ++products;
    }
    CHECK(centroids == 11);
    CHECK(products == 0);
    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["unmapped_products"].empty());
    CHECK(report["empty_groups"].empty());

    csv::write_file(dir / "lall_bad.csv", "product,category\nP0000,XXX\n");
    cfg.lall_path = (dir / "lall_bad.csv").string();
    CHECK(run_biplot(cfg) == 3); // unknown category is a parse error
}

TEST_CASE("biplot leaves crowded product clouds unlabeled") {
    const fs::path dir = fresh_dir("biplot_crowd");
    RunConfig cfg = synth_config(dir, 19, 10, 60);
    cfg.vars_path.clear(); // plain CA, products stay products
    CHECK(run_biplot(cfg) == 0);
    const std::string svg = slurp(dir / "out" / "biplot.svg");
    CHECK(svg.find("CA-1 (") != std::string::npos);
    CHECK(svg.find(">P0005<") == std::string::npos); // 60 products: no labels
    CHECK(svg.find(">C0005<") != std::string::npos); // countries stay labeled
}

TEST_CASE("validate passes honest runs and exits 12 under impossible tolerances") {
    const fs::path dir = fresh_dir("validate_f1");
    RunConfig cfg = f1_config(dir);
    CHECK(run_validate(cfg) == 0);
    json v = json::parse(slurp(dir / "out" / "validation.json"));
    CHECK(v["pass"] == true);
    CHECK(v["ordination"] == "ca");

    cfg.validate_rel = 1e-30;
    cfg.validate_norm = 1e-30;
    cfg.out_dir = (dir / "out_strict").string();
    CHECK(run_validate(cfg) == exit_validation_failed);
    v = json::parse(slurp(dir / "out_strict" / "validation.json"));
    CHECK(v["pass"] == false);

    csv::write_file(dir / "vars.csv", f1_vars);
    cfg = f1_config(dir);
    cfg.vars_path = (dir / "vars.csv").string();
    cfg.out_dir = (dir / "out_cca").string();
    CHECK(run_validate(cfg) == 0);
    v = json::parse(slurp(dir / "out_cca" / "validation.json"));
    CHECK(v["ordination"] == "cca");
    CHECK(v["pass"] == true);
}

TEST_CASE("synth output is deterministic and carries the planted gradient") {
    const fs::path dir = fresh_dir("synth_cmd");
    RunConfig gen;
    gen.out_dir = (dir / "a").string();
    gen.seed = 7;
    gen.countries = 12;
    gen.products = 40;
    CHECK(run_synth(gen) == 0);
    gen.out_dir = (dir / "b").string();
    CHECK(run_synth(gen) == 0);
    CHECK(slurp(dir / "a" / "trade.csv") == slurp(dir / "b" / "trade.csv"));
    CHECK(slurp(dir / "a" / "vars.csv") == slurp(dir / "b" / "vars.csv"));
    CHECK(slurp(dir / "a" / "truth.csv") == slurp(dir / "b" / "truth.csv"));
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));

    const json report = json::parse(slurp(dir / "a" / "report.json"));
    CHECK(report["seed"] == 7);
    CHECK(report["countries"] == 12);
    CHECK(report["products"] == 40);

    // the recovered leading axis orders countries like the planted ability
    RunConfig ca;
    ca.trade_path = (dir / "a" / "trade.csv").string();
    ca.out_dir = (dir / "a" / "ca").string();
    ca.axes = 1;
    CHECK(run_ca(ca) == 0);
    const auto eci = first_axis(slurp(dir / "a" / "ca" / "eci.csv"));
    const csv::Table truth = csv::parse(slurp(dir / "a" / "truth.csv"));
    Vec axis, ability;
    for (const csv::Row& row : truth.rows) {
        if (row.fields[0] != "ability") continue;
        bool ok = false;
        ability.push_back(csv::parse_number(row.fields[2], ok));
        axis.push_back(eci.at(row.fields[1]));
    }
    REQUIRE(ability.size() == 12);
    CHECK(std::abs(stats::spearman(axis, ability)) >= 0.9);
}

TEST_CASE("heavy synth noise flattens the spectrum but stays below one") {
    const fs::path dir = fresh_dir("synth_noise");
    RunConfig gen;
    gen.out_dir = dir.string();
    gen.seed = 44;
    gen.countries = 16;
    gen.products = 48;
    gen.noise = 0.5;
    CHECK(run_synth(gen) == 0);
    RunConfig ca;
    ca.trade_path = (dir / "trade.csv").string();
    ca.out_dir = (dir / "ca").string();
    ca.axes = 1;
    CHECK(run_ca(ca) == 0);
    const json report = json::parse(slurp(dir / "ca" / "report.json"));
    CHECK(report["eigenvalues"][0].get<double>() < 1.0);
}
