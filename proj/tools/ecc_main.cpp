// Command-line front end. Subcommands map 1:1 onto the run_* entry points;
// this file only handles flag parsing and the flags > config file > defaults
// precedence, so every behavior stays testable in-process.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecc/commands.hpp"
#include "ecc/csv.hpp"
#include "ecc/error.hpp"
#include "ecc/report.hpp"

namespace {

using nlohmann::json;

[[noreturn]] void arg_fail(const std::string& what) { ecc::fail(ecc::errc::argument, what); }

std::size_t parse_index(const std::string& s, const char* what) {
    if (s.empty()) arg_fail(std::string(what) + ": empty axis index");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || v < 1)
        arg_fail(std::string(what) + ": '" + s + "' is not a positive axis index");
    return static_cast<std::size_t>(v);
}

void parse_axis_pair(const std::string& s, std::size_t& a, std::size_t& b) {
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
        arg_fail("axis pair must look like A,B, got '" + s + "'");
    a = parse_index(s.substr(0, comma), "axis pair");
    b = parse_index(s.substr(comma + 1), "axis pair");
}

std::pair<std::size_t, double> parse_cap(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) arg_fail("cap must look like AXIS=LIMIT, got '" + s + "'");
    const std::size_t axis = parse_index(s.substr(0, eq), "cap");
    const std::string limit_str = s.substr(eq + 1);
    char* end = nullptr;
    const double limit = std::strtod(limit_str.c_str(), &end);
    if (limit_str.empty() || end != limit_str.c_str() + limit_str.size())
        arg_fail("cap limit '" + limit_str + "' is not a number");
    return {axis, limit};
}

std::string want_string(const json& v, const std::string& key) {
    if (!v.is_string()) arg_fail("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

double want_number(const json& v, const std::string& key) {
    if (!v.is_number()) arg_fail("config key '" + key + "' must be a number");
    return v.get<double>();
}

bool want_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) arg_fail("config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::uint64_t want_count(const json& v, const std::string& key) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        arg_fail("config key '" + key + "' must be an integer");
    if (v.is_number_integer() && v.get<long long>() < 0)
        arg_fail("config key '" + key + "' must be nonnegative");
    return v.get<std::uint64_t>();
}

// One flag <-> one config key. apply() runs only when the key is present in
// the config file and the flag was not given on the command line.
struct Binding {
    std::string flag;
    std::string key;
    std::function<void(const json&)> apply;
};

using Bindings = std::vector<Binding>;

void apply_config(CLI::App* sub, const Bindings& bindings, const std::string& path) {
    if (path.empty()) return;
    const std::string bytes = ecc::csv::read_file(path);
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        ecc::fail(ecc::errc::parse, "config " + path + ": " + e.what());
    }
    if (!j.is_object()) ecc::fail(ecc::errc::parse, "config " + path + ": root must be an object");
    std::set<std::string> allowed;
    for (const Binding& b : bindings) allowed.insert(b.key);
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) arg_fail("unknown config key '" + key + "'");
    for (const Binding& b : bindings)
        if (j.contains(b.key) && sub->count(b.flag) == 0) b.apply(j.at(b.key));
}

struct Front {
    ecc::RunConfig cfg;
    std::string axis_pair;
    std::vector<std::string> caps;
    std::string config_path;
    std::map<const CLI::App*, Bindings> bindings;

    void bind_string(CLI::App* sub, const char* flag, const char* key, std::string& field,
                     const char* desc) {
        sub->add_option(flag, field, desc)->capture_default_str();
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = want_string(v, key);
                                 }});
    }
    void bind_path(CLI::App* sub, const char* flag, const char* key, std::string& field,
                   const char* desc) {
        sub->add_option(flag, field, desc);
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = want_string(v, key);
                                 }});
    }
    void bind_double(CLI::App* sub, const char* flag, const char* key, double& field,
                     const char* desc) {
        sub->add_option(flag, field, desc)->capture_default_str();
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = want_number(v, key);
                                 }});
    }
    void bind_size(CLI::App* sub, const char* flag, const char* key, std::size_t& field,
                   const char* desc) {
        sub->add_option(flag, field, desc)->capture_default_str();
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = static_cast<std::size_t>(want_count(v, key));
                                 }});
    }
    void bind_int(CLI::App* sub, const char* flag, const char* key, int& field, const char* desc) {
        sub->add_option(flag, field, desc)->capture_default_str();
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = static_cast<int>(want_count(v, key));
                                 }});
    }
    void bind_u64(CLI::App* sub, const char* flag, const char* key, std::uint64_t& field,
                  const char* desc) {
        sub->add_option(flag, field, desc)->capture_default_str();
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = want_count(v, key);
                                 }});
    }
    void bind_flag(CLI::App* sub, const char* flag, const char* key, bool& field, const char* desc) {
        sub->add_flag(flag, field, desc);
        bindings[sub].push_back({flag, key, [&field, key = std::string(key)](const json& v) {
                                     field = want_bool(v, key);
                                 }});
    }
    void bind_caps(CLI::App* sub) {
        sub->add_option("--cap-axis", caps,
                        "symmetric |coordinate| limit for a displayed axis, AXIS=LIMIT; repeatable");
        bindings[sub].push_back({"--cap-axis", "cap_axis", [this](const json& v) {
                                     if (v.is_string()) {
                                         caps.push_back(v.get<std::string>());
                                     } else if (v.is_array()) {
                                         for (const json& item : v)
                                             caps.push_back(want_string(item, "cap_axis"));
                                     } else {
                                         arg_fail("config key 'cap_axis' must be a string or array");
                                     }
                                 }});
    }
    void bind_config(CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "JSON file of defaults; command-line flags take precedence");
    }

    void add_pipeline_flags(CLI::App* sub, bool with_method) {
        bind_path(sub, "--trade", "trade", cfg.trade_path, "trade CSV (year,country,product,value)");
        bind_path(sub, "--out", "out", cfg.out_dir, "output directory");
        bind_size(sub, "--axes", "axes", cfg.axes, "number of ordination axes");
        if (with_method)
            bind_string(sub, "--method", "method", cfg.method, "solver: eigen, iterative or both");
        bind_double(sub, "--tol", "tol", cfg.tol, "iterative convergence tolerance");
        bind_int(sub, "--max-iter", "max_iter", cfg.max_iter, "iterative iteration cap");
        bind_double(sub, "--rca-threshold", "rca_threshold", cfg.rca_threshold,
                    "specialization cutoff: x = 1 iff RCA > threshold");
        bind_flag(sub, "--largest-component", "largest_component", cfg.largest_component,
                  "keep the largest connected component instead of failing");
        bind_string(sub, "--sign", "sign", cfg.sign, "axis orientation: standard or none");
        bind_config(sub);
    }
};

} // namespace

int main(int argc, char** argv) {
    Front f;
    CLI::App app{"economic-complexity ordinations from trade data"};
    app.set_version_flag("--version", std::string(ecc::version_string));
    app.require_subcommand(1);

    CLI::App* ca = app.add_subcommand("ca", "correspondence analysis: ECI and PCI scores");
    f.add_pipeline_flags(ca, true);
    f.bind_int(ca, "--reflections", "reflections", f.cfg.reflections,
               "also dump this many method-of-reflections rounds");

    CLI::App* cca = app.add_subcommand("cca", "canonical correspondence analysis");
    f.add_pipeline_flags(cca, true);
    f.bind_path(cca, "--vars", "vars", f.cfg.vars_path, "country variables CSV (country,name1,...)");

    CLI::App* biplot = app.add_subcommand("biplot", "SVG biplot of an ordination");
    f.add_pipeline_flags(biplot, true);
    f.bind_path(biplot, "--vars", "vars", f.cfg.vars_path, "country variables CSV");
    f.bind_path(biplot, "--lall", "lall", f.cfg.lall_path,
                "product,category mapping; draws category centroids instead of products");
    f.bind_string(biplot, "--ordination", "ordination", f.cfg.ordination,
                  "ca, cca or auto (cca when --vars is given)");
    f.bind_string(biplot, "--axis-pair", "axis_pair", f.axis_pair, "displayed axes, e.g. 2,3");
    f.bind_caps(biplot);
    f.bind_flag(biplot, "--ray-extension", "ray_extension", f.cfg.ray_extension,
                "extend variable rays through the origin (dashed)");

    CLI::App* validate = app.add_subcommand("validate", "check ordination invariants");
    f.bind_path(validate, "--trade", "trade", f.cfg.trade_path, "trade CSV");
    f.bind_path(validate, "--vars", "vars", f.cfg.vars_path, "country variables CSV");
    f.bind_path(validate, "--out", "out", f.cfg.out_dir, "output directory");
    f.bind_size(validate, "--axes", "axes", f.cfg.axes, "number of ordination axes");
    f.bind_double(validate, "--rca-threshold", "rca_threshold", f.cfg.rca_threshold,
                  "specialization cutoff");
    f.bind_flag(validate, "--largest-component", "largest_component", f.cfg.largest_component,
                "keep the largest connected component instead of failing");
    f.bind_string(validate, "--sign", "sign", f.cfg.sign, "axis orientation: standard or none");
    f.bind_string(validate, "--ordination", "ordination", f.cfg.ordination, "ca, cca or auto");
    f.bind_double(validate, "--rel-tol", "rel_tol", f.cfg.validate_rel,
                  "relative residual tolerance");
    f.bind_double(validate, "--norm-tol", "norm_tol", f.cfg.validate_norm,
                  "normalization residual tolerance");
    f.bind_config(validate);

    CLI::App* synth = app.add_subcommand("synth", "generate a planted-gradient dataset");
    f.bind_path(synth, "--out", "out", f.cfg.out_dir, "output directory");
    f.bind_u64(synth, "--seed", "seed", f.cfg.seed, "generator seed");
    f.bind_size(synth, "--countries", "countries", f.cfg.countries, "number of countries");
    f.bind_size(synth, "--products", "products", f.cfg.products, "number of products");
    f.bind_size(synth, "--num-vars", "num_vars", f.cfg.num_vars,
                "country variables; the first is the planted ability");
    f.bind_double(synth, "--noise", "noise", f.cfg.noise,
                  "probability a cell's effective ability is resampled");
    f.bind_double(synth, "--var-noise", "var_noise", f.cfg.var_noise,
                  "additive uniform noise on the variables");
    f.bind_int(synth, "--year", "year", f.cfg.year, "year stamped on the trade records");
    f.bind_config(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(sub, f.bindings[sub], f.config_path);
        if (!f.axis_pair.empty()) parse_axis_pair(f.axis_pair, f.cfg.axis_a, f.cfg.axis_b);
        for (const std::string& cap : f.caps) f.cfg.caps.push_back(parse_cap(cap));
    } catch (const ecc::Error& e) {
        std::fprintf(stderr, "ecc %s: %s error: %s\n", sub->get_name().c_str(),
                     ecc::errc_name(e.code()), e.what());
        return ecc::exit_code_for(e.code());
    }

    if (sub == ca) return ecc::run_ca(f.cfg);
    if (sub == cca) return ecc::run_cca(f.cfg);
    if (sub == biplot) return ecc::run_biplot(f.cfg);
    if (sub == validate) return ecc::run_validate(f.cfg);
    if (sub == synth) return ecc::run_synth(f.cfg);
    std::fprintf(stderr, "ecc: internal error: unknown subcommand\n");
    return ecc::exit_code_for(ecc::errc::internal);
}
