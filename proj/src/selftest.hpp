#pragma once

#include <string>

#include "theory.hpp"

namespace isoclass {

struct SelftestResult {
    bool all_pass = true;
    std::string report_json;
};

// Exact self-checks: orthogonal Grassmannian counts against the closed form,
// exhaustive moment averages, weight-sum identities and bounds, invertible
// alternating fractions by enumeration, and the series form of the rank-2
// determinant integral.
SelftestResult run_selftest(SpOrderCache& cache);

} // namespace isoclass
