#pragma once

#include <stdexcept>
#include <string>

namespace isoclass {

enum class errc {
    invalid_argument,      // bad parameters, parity violations, malformed config
    too_large,             // enumeration / precision guard exceeded
    unresolved_precision,  // elementary divisors collide with the truncation boundary
    singular_matrix,       // det == 0 mod p^E where a nonsingular matrix is required
    not_in_span,           // vector fails membership in both torsion spans
    degenerate_buckets,    // chi-square with < 1 degree of freedom
    theory_unavailable,    // no closed-form law for the requested comparison
    internal,              // invariant violated; indicates a bug
};

class error : public std::runtime_error {
  public:
    error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

} // namespace isoclass
