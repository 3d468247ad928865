#pragma once

// Shared fixture builders for the test binaries. Everything here is
// deterministic given the seed.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ecc/ca.hpp"
#include "ecc/ingest.hpp"
#include "ecc/matrix.hpp"

namespace ecc::testsupport {

inline std::vector<std::string> labels(const char* prefix, std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
        out.emplace_back(buf);
    }
    return out;
}

// Random binary matrix with no empty rows or columns, connected bipartite
// graph. Repair and linking steps are deterministic in the seed.
inline SpecializationMatrix random_connected(std::uint64_t seed, std::size_t n, std::size_t m,
                                             double density = 0.35) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix x(n, m);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < m; ++p) x(q, p) = unit(rng) < density ? 1.0 : 0.0;

    for (std::size_t q = 0; q < n; ++q) {
        double s = 0.0;
        for (std::size_t p = 0; p < m; ++p) s += x(q, p);
        if (s == 0.0) x(q, rng() % m) = 1.0;
    }
    for (std::size_t p = 0; p < m; ++p) {
        double d = 0.0;
        for (std::size_t q = 0; q < n; ++q) d += x(q, p);
        if (d == 0.0) x(rng() % n, p) = 1.0;
    }

    auto sm = make_specialization_from_binary(labels("p", n), labels("c", m), x);
    for (std::size_t guard = 0; guard < n + m; ++guard) {
        const Components comps = bipartite_components(sm);
        if (comps.count <= 1) break;
        // Link component 1 to component 0 through one new cell.
        std::size_t q0 = 0, p1 = 0;
        for (std::size_t q = 0; q < n; ++q)
            if (comps.product_component[q] == 0) {
                q0 = q;
                break;
            }
        for (std::size_t p = 0; p < m; ++p)
            if (comps.country_component[p] == 1) {
                p1 = p;
                break;
            }
        Matrix next = sm.x;
        next(q0, p1) = 1.0;
        sm = make_specialization_from_binary(labels("p", n), labels("c", m), std::move(next));
    }
    return sm;
}

} // namespace ecc::testsupport
