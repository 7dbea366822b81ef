#include "padic.hpp"

namespace isoclass {

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d : {2ull, 3ull, 5ull, 7ull}) {
        if (n == d) return true;
        if (n % d == 0) return false;
    }
    for (uint64_t d = 11; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

PadicCtx::PadicCtx(uint64_t p, uint32_t E) : p_(p), E_(E) {
    if (!is_prime_u64(p)) fail(errc::invalid_argument, "p must be prime");
    if (E < 1) fail(errc::invalid_argument, "precision E must be >= 1");
    uint64_t q = 1;
    const uint64_t limit = uint64_t(1) << 63;
    for (uint32_t i = 0; i < E; i++) {
        if (q >= limit / p)
            fail(errc::too_large, "p^E exceeds the 2^63 residue bound");
        q *= p;
    }
    q_ = q;
}

uint64_t PadicCtx::pow_p(uint32_t k) const {
    if (k > E_) fail(errc::invalid_argument, "p^k with k > E");
    uint64_t r = 1;
    for (uint32_t i = 0; i < k; i++) r *= p_;
    return r;
}

uint32_t PadicCtx::val(uint64_t a) const {
    if (a == 0) return E_;
    uint32_t v = 0;
    while (a % p_ == 0) {
        a /= p_;
        v++;
    }
    return v;
}

uint64_t PadicCtx::unit_inv(uint64_t a) const {
    if (!is_unit(a)) fail(errc::internal, "unit_inv of a non-unit");
    // Extended Euclid on (a, q); q < 2^63 keeps intermediates in range.
    int64_t t0 = 0, t1 = 1;
    uint64_t r0 = q_, r1 = a % q_;
    while (r1 != 0) {
        uint64_t qt = r0 / r1;
        uint64_t r2 = r0 - qt * r1;
        int64_t t2 = t0 - int64_t(qt) * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    int64_t t = t0 % int64_t(q_);
    if (t < 0) t += int64_t(q_);
    return uint64_t(t);
}

} // namespace isoclass
