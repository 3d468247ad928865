#pragma once

#include <cstdint>

namespace ecc {

// splitmix64: platform-independent deterministic stream; avoids std::
// distributions so generated bytes never depend on the standard library.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace ecc
