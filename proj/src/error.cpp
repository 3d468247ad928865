#include "ecc/error.hpp"

namespace ecc {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::argument: return "argument";
        case errc::input: return "input";
        case errc::parse: return "parse";
        case errc::domain: return "domain";
        case errc::degenerate: return "degenerate";
        case errc::disconnected: return "disconnected";
        case errc::collinear: return "collinear";
        case errc::convergence: return "convergence";
        case errc::numerical: return "numerical";
        case errc::internal: return "internal";
    }
    return "unknown";
}

} // namespace ecc
