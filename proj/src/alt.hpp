#pragma once

#include <cstdint>
#include <vector>

#include "mat.hpp"

namespace isoclass {

// Alternating n x n matrix over Z/p^E: zero diagonal, entry(j,i) = -entry(i,j).
// Only the strictly-upper triangle is stored.
class AltMat {
  public:
    AltMat() : n_(0) {}
    explicit AltMat(size_t n) : n_(n), upper_(n * (n - (n ? 1 : 0)) / 2, 0) {}

    size_t n() const { return n_; }
    uint64_t& upper(size_t i, size_t j) { return upper_[idx(i, j)]; }
    uint64_t upper(size_t i, size_t j) const { return upper_[idx(i, j)]; }
    std::vector<uint64_t>& raw() { return upper_; }
    const std::vector<uint64_t>& raw() const { return upper_; }

    uint64_t entry(size_t i, size_t j, const PadicCtx& ctx) const {
        if (i == j) return 0;
        return i < j ? upper_[idx(i, j)] : ctx.neg(upper_[idx(j, i)]);
    }

    MatModQ to_mat(const PadicCtx& ctx) const;

  private:
    size_t idx(size_t i, size_t j) const { return i * (2 * n_ - i - 1) / 2 + (j - i - 1); }
    size_t n_;
    std::vector<uint64_t> upper_;
};

// Haar: strictly-upper entries independent uniform mod p^E.
AltMat sample_alt_haar(size_t n, const PadicCtx& ctx, Rng& rng);

// Rank-(n-r) stratum sample via the pushforward construction
// A = M^t * blockdiag(core, 0_r) * M with M uniform unimodular and core a
// Haar alternating (n-r) x (n-r) matrix conditioned nonsingular mod p^E and
// reweighted by |det core|^r (rejection).  Cores with det == 0 mod p^E are
// truncation-boundary events: they are resampled and counted.
struct StratumSample {
    AltMat A;                      // filled only when build_full is set
    AltMat core;
    CokernelShape core_shape;      // torsion of coker A; free_rank forced to r
    uint32_t det_val = 0;          // v_p(det core)
    uint64_t boundary_resamples = 0;
};

StratumSample sample_alt_stratum(size_t n, uint32_t r, const PadicCtx& ctx, Rng& rng,
                                 bool build_full = true);

// (coker A)_tors for a stratum sample; free_rank reports r.
CokernelShape coker_tors_sample(size_t n, uint32_t r, const PadicCtx& ctx, Rng& rng,
                                uint64_t* boundary_resamples = nullptr);

// Value of x^t A^{-1} y in p^{-E}Z/Z, reduced to lowest terms: num / p^k with
// p not dividing num (or num = 0, k = 0).
struct PairingValue {
    uint64_t num = 0;
    uint32_t k = 0;
    bool operator==(const PairingValue&) const = default;
    bool is_zero() const { return num == 0; }
};

PairingValue reduce_pairing(uint64_t num, uint32_t k, const PadicCtx& ctx);
PairingValue pairing_add(PairingValue a, PairingValue b, const PadicCtx& ctx);
PairingValue pairing_neg(PairingValue a, const PadicCtx& ctx);

// Pairing data of a nonsingular alternating matrix: the SNF-transformed form
// in which x^t A^{-1} y = sum_i (V^t x)_i (U y)_i / p^{e_i}.
class CokernelPairing {
  public:
    CokernelPairing(const AltMat& A, const PadicCtx& ctx); // SingularMatrix if det == 0 mod p^E

    PairingValue eval(const std::vector<uint64_t>& x, const std::vector<uint64_t>& y) const;

    const std::vector<uint32_t>& exps() const { return exps_; }
    // Representative vector of the coker class with coordinate c_i on the
    // i-th cyclic factor Z/p^{e_i}.
    std::vector<uint64_t> class_rep(const std::vector<uint64_t>& coords) const;

  private:
    PadicCtx ctx_;
    std::vector<uint32_t> exps_;
    MatModQ Vt_, U_, Uinv_;
};

PairingValue cokernel_pairing(const AltMat& A, const std::vector<uint64_t>& x,
                              const std::vector<uint64_t>& y, const PadicCtx& ctx);

// Do A and D induce the same pairing x^t (.)^{-1} y mod Z_p?  Decided two
// independent ways on the exact alternating integer lifts:
//   way 1: det A != 0 mod p^E and A^{-1} - D^{-1} integral at p;
//   way 2: A in D + D M_n(Z_p) D and rank(A mod p) == rank(D mod p).
// The two characterizations must agree; disagreement raises internal error.
bool same_pairing(const AltMat& A, const AltMat& D, const PadicCtx& ctx);

// Standard nonsingular block form from half-size exponents e_1..e_{n/2}:
// [[0, diag(p^e)], [-diag(p^e), 0]].
AltMat standard_alt(const std::vector<uint32_t>& e_half, const PadicCtx& ctx);

// Fast membership test A in D + D M D (+ rank condition) for the standard
// block form: entrywise congruences a_ij = d_ij mod p^{e_i + e_j}.
bool same_pairing_standard(const AltMat& A, const std::vector<uint32_t>& e_half,
                           const PadicCtx& ctx);

// Monte Carlo estimate of Prob([,]_A = [,]_D) over Haar A, D standard.
double prob_pairing_match_mc(const std::vector<uint32_t>& e_half, size_t n,
                             const PadicCtx& ctx, uint64_t trials, uint64_t seed);

// Torsion exponents of coker A for alternating A, verified to occur in even
// multiplicities.  UnresolvedPrecision when the shape is not resolved.
Partition symplectic_divisors(const AltMat& A, const PadicCtx& ctx);

} // namespace isoclass
