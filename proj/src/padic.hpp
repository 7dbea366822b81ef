#pragma once

#include <cstdint>

#include "errors.hpp"

namespace isoclass {

// Arithmetic context: prime p and working precision E.  Elements of Z_p are
// represented by residues mod q = p^E held in uint64.  The constructor
// rejects p^E >= 2^63 so products fit in __uint128_t; all experiment configs
// validate their escalation cap against this bound up front.
class PadicCtx {
  public:
    PadicCtx(uint64_t p, uint32_t E);

    uint64_t p() const { return p_; }
    uint32_t E() const { return E_; }
    uint64_t q() const { return q_; }

    PadicCtx with_precision(uint32_t E) const { return PadicCtx(p_, E); }

    uint64_t pow_p(uint32_t k) const; // p^k, requires k <= E

    uint64_t add(uint64_t a, uint64_t b) const {
        uint64_t s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + q_ - b; }
    uint64_t neg(uint64_t a) const { return a == 0 ? 0 : q_ - a; }
    uint64_t mul(uint64_t a, uint64_t b) const {
        return uint64_t((__uint128_t)a * b % q_);
    }

    // p-adic valuation of a residue; returns E for 0 (meaning ">= E").
    uint32_t val(uint64_t a) const;

    bool is_unit(uint64_t a) const { return a % p_ != 0; }

    // Inverse of a unit mod p^E.
    uint64_t unit_inv(uint64_t a) const;

  private:
    uint64_t p_;
    uint32_t E_;
    uint64_t q_;
};

bool is_prime_u64(uint64_t n);

} // namespace isoclass
