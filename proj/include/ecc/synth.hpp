#pragma once

#include <cstdint>
#include <string>

#include "ecc/ingest.hpp"

namespace ecc {

struct SynthConfig {
    std::size_t countries = 50; // m
    std::size_t products = 200; // n
    std::size_t num_vars = 1;   // z; variable 1 is the (noisy) ability itself
    double noise = 0.0;         // probability a cell's effective ability is resampled
    double var_noise = 0.0;     // additive uniform noise on the variables
    std::uint64_t seed = 1;
    int year = 2018;
};

// Planted-gradient fixture. Country abilities and product difficulties are
// uniform draws; trade values decay with the |ability - difficulty| mismatch,
// and the binary pattern is whatever the RCA pipeline at threshold 1 makes of
// those values (verified through the text round-trip before returning), so a
// country specializes in the difficulty band around its ability. Noise
// resamples the effective ability of single cells. Environment variables are
// linear functions of ability plus noise; the truth table carries the
// planted gradients.
struct SynthResult {
    std::string trade_csv; // year,country,product,value
    std::string vars_csv;  // country,ability,v2,...
    std::string truth_csv; // kind,label,value
    SpecializationMatrix sm;
    Vec ability;    // per country, label order
    Vec difficulty; // per product, label order
};

SynthResult synthesize(const SynthConfig& cfg);

} // namespace ecc
