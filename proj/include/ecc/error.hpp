#pragma once

#include <stdexcept>
#include <string>

namespace ecc {

// Error taxonomy shared by the library and the CLI. Each class maps to a
// distinct process exit code (see commands.hpp).
enum class errc {
    argument,      // bad parameters (axis out of range, tol <= 0, ...)
    input,         // missing or unreadable file
    parse,         // malformed CSV row
    domain,        // values outside the allowed domain (negative trade value)
    degenerate,    // table too small after pruning, zero variance, ...
    disconnected,  // bipartite graph of X has more than one component
    collinear,     // Y'WY singular or ill-conditioned
    convergence,   // iteration did not converge within max_iter
    numerical,     // unexpected spectrum, non-finite intermediate
    internal,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

const char* errc_name(errc code) noexcept;

} // namespace ecc
