#include "ecc/biplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "ecc/csv.hpp"
#include "ecc/error.hpp"
#include "ecc/kernels.hpp"
#include "ecc/stats.hpp"

namespace ecc {

namespace {

const char* const palette[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad",
                               "#d35400", "#16a085", "#7f8c8d", "#f39c12"};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string svg_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Radius in pixels, monotone in value: sqrt-area interpolation between
// r_lo and r_hi over the observed value range.
double bubble_radius(double value, double lo, double hi, double r_lo, double r_hi) {
    if (!(hi > lo)) return 0.5 * (r_lo + r_hi);
    const double t = std::sqrt((value - lo) / (hi - lo));
    return r_lo + (r_hi - r_lo) * t;
}

struct PixelMap {
    double range_a = 1.0, range_b = 1.0;
    double x0 = 60.0, x1 = 730.0; // plot frame in pixels
    double y0 = 30.0, y1 = 500.0;
    double px(double x) const { return x0 + (x + range_a) / (2.0 * range_a) * (x1 - x0); }
    double py(double y) const { return y1 - (y + range_b) / (2.0 * range_b) * (y1 - y0); }
};

PixelMap make_pixel_map(const BiplotModel& m) {
    PixelMap map;
    double max_a = 0.0, max_b = 0.0;
    for (const auto& p : m.points) {
        max_a = std::max(max_a, std::abs(p.x));
        max_b = std::max(max_b, std::abs(p.y));
    }
    for (const auto& r : m.rays) {
        max_a = std::max(max_a, std::abs(r.x));
        max_b = std::max(max_b, std::abs(r.y));
    }
    map.range_a = m.cap_a > 0.0 ? m.cap_a : (max_a > 0.0 ? 1.08 * max_a : 1.0);
    map.range_b = m.cap_b > 0.0 ? m.cap_b : (max_b > 0.0 ? 1.08 * max_b : 1.0);
    return map;
}

} // namespace

ScaledScores scale_type1(const Matrix& u, const Matrix& v, const Vec& lambda) {
    if (u.cols() != lambda.size() || v.cols() != lambda.size())
        fail(errc::internal, "scale_type1: score and eigenvalue shapes disagree");
    ScaledScores out{u, v};
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (!(lambda[j] > 0.0))
            fail(errc::degenerate, "scale_type1: axis " + std::to_string(j + 1) +
                                       " has non-positive eigenvalue " + std::to_string(lambda[j]));
        const double inv = 1.0 / std::sqrt(lambda[j]);
        for (std::size_t i = 0; i < u.rows(); ++i) out.u_hat(i, j) *= inv;
        for (std::size_t i = 0; i < v.rows(); ++i) out.v_hat(i, j) *= inv;
    }
    return out;
}

ScaledScores scale_type1(const CaResult& r) {
    // For CA the country score V is the eigenvector scaled by its eigenvalue.
    Matrix v = r.country_axes;
    for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
        for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) *= r.eigenvalues[j];
    return scale_type1(r.product_axes, v, r.eigenvalues);
}

ScaledScores scale_type1(const CcaResult& r) { return scale_type1(r.u, r.v, r.lambda); }

VariableRays intraclass_correlations(const CountryVariableTable& env, const Matrix& country_scores,
                                     const SpecializationMatrix& sm) {
    const std::size_t m = sm.countries.size();
    const std::size_t z = env.names.size();
    const std::size_t k = country_scores.cols();
    if (country_scores.rows() != m || env.y.rows() != m)
        fail(errc::internal, "intraclass_correlations: labels not aligned");

    VariableRays out;
    out.names = env.names;
    out.a = Matrix(z, k);
    for (std::size_t j = 0; j < k; ++j) {
        Vec vt = country_scores.col(j);
        const double sd = stats::standardize_weighted(vt, sm.w);
        if (sd == 0.0)
            fail(errc::degenerate, "intraclass_correlations: axis " + std::to_string(j + 1) +
                                       " has zero weighted variance");
        for (std::size_t i = 0; i < z; ++i)
            out.a(i, j) = stats::weighted_dot(env.y.col(i), vt, sm.w);
    }
    return out;
}

VariableRays intraclass_correlations(const CountryVariableTable& env, const CaResult& r,
                                     const SpecializationMatrix& sm) {
    return intraclass_correlations(env, r.country_axes, sm);
}

VariableRays intraclass_correlations(const CountryVariableTable& env, const CcaResult& r,
                                     const SpecializationMatrix& sm) {
    return intraclass_correlations(env, r.v, sm);
}

std::vector<std::pair<std::string, std::string>> parse_lall_csv(const std::string& bytes) {
    const csv::Table t = csv::parse(bytes);
    if (t.header != std::vector<std::string>{"product", "category"})
        fail(errc::parse, "lall mapping: header must be `product,category`");
    if (t.rows.empty()) fail(errc::parse, "lall mapping: no data rows");

    std::set<std::string> valid(lall_categories.begin(), lall_categories.end());
    std::map<std::string, std::string> seen;
    std::set<std::string> offenders;
    for (const auto& row : t.rows) {
        if (row.fields.size() != 2)
            fail(errc::parse, "lall mapping: line " + std::to_string(row.line) +
                                  ": expected 2 fields, got " + std::to_string(row.fields.size()));
        const std::string& product = row.fields[0];
        const std::string& category = row.fields[1];
        if (product.empty())
            fail(errc::parse, "lall mapping: line " + std::to_string(row.line) + ": empty product");
        if (!valid.count(category)) offenders.insert(category);
        if (!seen.emplace(product, category).second)
            fail(errc::parse, "lall mapping: duplicate product " + product + " at line " +
                                  std::to_string(row.line));
    }
    if (!offenders.empty()) {
        std::string msg = "lall mapping: unknown categories:";
        for (const auto& o : offenders) msg += " " + o;
        fail(errc::parse, msg);
    }
    return {seen.begin(), seen.end()};
}

CentroidTable group_centroids(const ScaledScores& scores, const SpecializationMatrix& sm,
                              const std::vector<std::pair<std::string, std::string>>& mapping) {
    const std::size_t n = sm.products.size();
    const std::size_t k = scores.u_hat.cols();
    if (scores.u_hat.rows() != n)
        fail(errc::internal, "group_centroids: scores not aligned to products");

    std::map<std::string, std::string> lookup(mapping.begin(), mapping.end());
    std::map<std::string, std::vector<std::size_t>> groups;
    for (const auto& [product, category] : mapping) groups[category]; // reserve mapped categories

    CentroidTable out;
    for (std::size_t q = 0; q < n; ++q) {
        const auto it = lookup.find(sm.products[q]);
        if (it == lookup.end()) {
            groups["unmapped"].push_back(q);
            out.unmapped.push_back(sm.products[q]);
        } else {
            groups[it->second].push_back(q);
        }
    }

    for (const auto& [label, members] : groups) {
        if (members.empty()) {
            out.empty_groups.push_back(label);
            continue;
        }
        Centroid c;
        c.group = label;
        c.members = members.size();
        for (std::size_t q : members) c.total_ubiquity += sm.ubiquity[q];
        c.mean_ubiquity = c.total_ubiquity / static_cast<double>(c.members);
        c.coords.assign(k, 0.0);
        if (members.size() == 1) {
            // Singleton average is the point itself; copy verbatim.
            for (std::size_t j = 0; j < k; ++j) c.coords[j] = scores.u_hat(members[0], j);
        } else {
            for (std::size_t j = 0; j < k; ++j) {
                double acc = 0.0;
                for (std::size_t q : members) acc += sm.ubiquity[q] * scores.u_hat(q, j);
                c.coords[j] = acc / c.total_ubiquity;
            }
        }
        out.rows.push_back(std::move(c));
    }
    return out;
}

BiplotModel assemble_biplot(const ScaledScores& scores, const SpecializationMatrix& sm,
                            const Vec& inertia_shares, const VariableRays* rays,
                            const CentroidTable* centroids, const BiplotOptions& options) {
    const std::size_t n = sm.products.size();
    const std::size_t m = sm.countries.size();
    const std::size_t k = scores.u_hat.cols();
    if (scores.u_hat.rows() != n || scores.v_hat.rows() != m || scores.v_hat.cols() != k)
        fail(errc::internal, "assemble_biplot: scores not aligned to the specialization matrix");
    if (inertia_shares.size() != k)
        fail(errc::internal, "assemble_biplot: inertia shares not aligned to axes");
    if (options.axis_a < 1 || options.axis_a > k || options.axis_b < 1 || options.axis_b > k)
        fail(errc::argument, "assemble_biplot: axis pair (" + std::to_string(options.axis_a) + "," +
                                 std::to_string(options.axis_b) + ") out of range 1.." +
                                 std::to_string(k));
    if (options.cap_a < 0.0 || options.cap_b < 0.0)
        fail(errc::argument, "assemble_biplot: axis caps must be positive");

    const std::size_t ja = options.axis_a - 1, jb = options.axis_b - 1;

    BiplotModel model;
    model.axis_a = options.axis_a;
    model.axis_b = options.axis_b;
    model.cap_a = options.cap_a;
    model.cap_b = options.cap_b;
    model.ray_back_extension = options.ray_back_extension;
    model.label_a = options.axis_prefix + "-" + std::to_string(options.axis_a) + " (" +
                    fmt("%.1f", 100.0 * inertia_shares[ja]) + "%)";
    model.label_b = options.axis_prefix + "-" + std::to_string(options.axis_b) + " (" +
                    fmt("%.1f", 100.0 * inertia_shares[jb]) + "%)";

    const auto clip = [&](BiplotPoint& p) {
        if ((model.cap_a > 0.0 && std::abs(p.x) > model.cap_a) ||
            (model.cap_b > 0.0 && std::abs(p.y) > model.cap_b)) {
            p.clipped = true;
            model.clipped.push_back(p.label);
        }
    };

    double d_lo = sm.diversity[0], d_hi = sm.diversity[0];
    for (double d : sm.diversity) {
        d_lo = std::min(d_lo, d);
        d_hi = std::max(d_hi, d);
    }
    for (std::size_t p = 0; p < m; ++p) {
        BiplotPoint pt;
        pt.label = sm.countries[p];
        pt.kind = "country";
        pt.x = scores.v_hat(p, ja);
        pt.y = scores.v_hat(p, jb);
        pt.size = bubble_radius(sm.diversity[p], d_lo, d_hi, 3.0, 10.0);
        clip(pt);
        model.points.push_back(std::move(pt));
    }

    if (centroids != nullptr) {
        double u_lo = 0.0, u_hi = 0.0;
        if (!centroids->rows.empty()) {
            u_lo = u_hi = centroids->rows.front().mean_ubiquity;
            for (const auto& c : centroids->rows) {
                u_lo = std::min(u_lo, c.mean_ubiquity);
                u_hi = std::max(u_hi, c.mean_ubiquity);
            }
        }
        for (const auto& c : centroids->rows) {
            if (c.coords.size() != k)
                fail(errc::internal, "assemble_biplot: centroid axes disagree with scores");
            BiplotPoint pt;
            pt.label = c.group;
            pt.kind = "centroid";
            pt.group = c.group;
            pt.x = c.coords[ja];
            pt.y = c.coords[jb];
            pt.size = bubble_radius(c.mean_ubiquity, u_lo, u_hi, 4.0, 12.0);
            clip(pt);
            model.points.push_back(std::move(pt));
        }
        model.label_products = true; // centroid labels always drawn
    } else {
        double s_lo = sm.ubiquity[0], s_hi = sm.ubiquity[0];
        for (double s : sm.ubiquity) {
            s_lo = std::min(s_lo, s);
            s_hi = std::max(s_hi, s);
        }
        for (std::size_t q = 0; q < n; ++q) {
            BiplotPoint pt;
            pt.label = sm.products[q];
            pt.kind = "product";
            pt.x = scores.u_hat(q, ja);
            pt.y = scores.u_hat(q, jb);
            pt.size = bubble_radius(sm.ubiquity[q], s_lo, s_hi, 2.0, 8.0);
            clip(pt);
            model.points.push_back(std::move(pt));
        }
        model.label_products = n <= 50;
    }

    if (rays != nullptr) {
        if (rays->a.cols() != k)
            fail(errc::internal, "assemble_biplot: ray axes disagree with scores");
        for (std::size_t i = 0; i < rays->names.size(); ++i) {
            BiplotRay ray;
            ray.label = rays->names[i];
            ray.x = rays->a(i, ja);
            ray.y = rays->a(i, jb);
            ray.color = palette[i % (sizeof(palette) / sizeof(palette[0]))];
            model.rays.push_back(std::move(ray));
        }
    }
    return model;
}

std::string render_svg(const BiplotModel& model) {
    const PixelMap map = make_pixel_map(model);
    const auto clamp_a = [&](double x) { return std::clamp(x, -map.range_a, map.range_a); };
    const auto clamp_b = [&](double y) { return std::clamp(y, -map.range_b, map.range_b); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"560\" "
           "viewBox=\"0 0 760 560\" font-family=\"Helvetica, Arial, sans-serif\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"760\" height=\"560\" fill=\"#ffffff\"/>\n";
    svg += "<rect class=\"frame\" x=\"" + fmt("%.2f", map.x0) + "\" y=\"" + fmt("%.2f", map.y0) +
           "\" width=\"" + fmt("%.2f", map.x1 - map.x0) + "\" height=\"" + fmt("%.2f", map.y1 - map.y0) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Zero lines through the origin.
    svg += "<line class=\"axis\" x1=\"" + fmt("%.2f", map.x0) + "\" y1=\"" + fmt("%.2f", map.py(0.0)) +
           "\" x2=\"" + fmt("%.2f", map.x1) + "\" y2=\"" + fmt("%.2f", map.py(0.0)) +
           "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + fmt("%.2f", map.px(0.0)) + "\" y1=\"" + fmt("%.2f", map.y0) +
           "\" x2=\"" + fmt("%.2f", map.px(0.0)) + "\" y2=\"" + fmt("%.2f", map.y1) +
           "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";

    svg += "<text class=\"axis-label\" x=\"" + fmt("%.2f", 0.5 * (map.x0 + map.x1)) +
           "\" y=\"545\" text-anchor=\"middle\" font-size=\"14\">" + svg_escape(model.label_a) +
           "</text>\n";
    svg += "<text class=\"axis-label\" x=\"18\" y=\"" + fmt("%.2f", 0.5 * (map.y0 + map.y1)) +
           "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 " +
           fmt("%.2f", 0.5 * (map.y0 + map.y1)) + ")\">" + svg_escape(model.label_b) + "</text>\n";

    for (const auto& ray : model.rays) {
        const double tx = map.px(clamp_a(ray.x)), ty = map.py(clamp_b(ray.y));
        if (model.ray_back_extension) {
            svg += "<line class=\"ray back\" x1=\"" + fmt("%.2f", map.px(0.0)) + "\" y1=\"" +
                   fmt("%.2f", map.py(0.0)) + "\" x2=\"" + fmt("%.2f", map.px(clamp_a(-ray.x))) +
                   "\" y2=\"" + fmt("%.2f", map.py(clamp_b(-ray.y))) + "\" stroke=\"" + ray.color +
                   "\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
        }
        svg += "<line class=\"ray\" x1=\"" + fmt("%.2f", map.px(0.0)) + "\" y1=\"" +
               fmt("%.2f", map.py(0.0)) + "\" x2=\"" + fmt("%.2f", tx) + "\" y2=\"" + fmt("%.2f", ty) +
               "\" stroke=\"" + ray.color + "\" stroke-width=\"1.5\"/>\n";
        svg += "<text class=\"ray-label\" x=\"" + fmt("%.2f", tx) + "\" y=\"" + fmt("%.2f", ty - 4.0) +
               "\" text-anchor=\"middle\" font-size=\"11\" fill=\"" + ray.color + "\">" +
               svg_escape(ray.label) + "</text>\n";
    }

    for (const auto& p : model.points) {
        const double cx = map.px(clamp_a(p.x)), cy = map.py(clamp_b(p.y));
        std::string cls = p.kind;
        if (p.clipped) cls += " clipped";
        const char* fill = p.kind == "country" ? "#2b6cb0" : (p.kind == "centroid" ? "#c05621" : "#718096");
        svg += "<circle class=\"" + cls + "\" cx=\"" + fmt("%.2f", cx) + "\" cy=\"" + fmt("%.2f", cy) +
               "\" r=\"" + fmt("%.2f", p.size) + "\" fill=\"" + fill + "\" fill-opacity=\"0.55\" stroke=\"" +
               fill + "\"/>\n";
        const bool labeled = p.kind == "country" || p.kind == "centroid" || model.label_products;
        if (labeled)
            svg += "<text class=\"label " + p.kind + "\" x=\"" + fmt("%.2f", cx) + "\" y=\"" +
                   fmt("%.2f", cy - p.size - 2.0) + "\" text-anchor=\"middle\" font-size=\"10\">" +
                   svg_escape(p.label) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

std::string biplot_csv(const BiplotModel& model) {
    std::string out = "entity,kind,axis_a,axis_b,size,group\n";
    for (const auto& p : model.points)
        out += p.label + "," + p.kind + "," + csv::format_number(p.x) + "," + csv::format_number(p.y) +
               "," + csv::format_number(p.size) + "," + p.group + "\n";
    for (const auto& r : model.rays)
        out += r.label + ",ray," + csv::format_number(r.x) + "," + csv::format_number(r.y) + ",0,\n";
    return out;
}

} // namespace ecc
