#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "exact.hpp"
#include "partition.hpp"

namespace isoclass {

// Finite abelian p-group carrying a nondegenerate alternating pairing; the
// exponent partition necessarily has even multiplicities.
struct SymplecticType {
    uint64_t p;
    Partition part;

    BigInt order() const { return bigint_pow(BigInt(p), part.exp_sum()); }
};

// prod_{i=1}^{m/2} (1 - p^{1-2i}): fraction of invertible matrices among
// alternating m x m matrices mod p.
BigRat gl_alt_ratio(uint32_t m, uint64_t p);

// Truncation of prod_{i=r+1}^inf (1 - p^{1-2i}) with a certified
// multiplicative tail bound: value * (1 - tail) <= true value <= value.
struct EulerAlt {
    double value;
    double tail;
};
EulerAlt euler_alt(uint32_t r, uint64_t p, double tol = 1e-12);

// Exact order of the group of pairing-preserving automorphisms, by brute
// force: images of a standard symplectic generator sequence are scanned level
// by level; the count at each level depends only on the isomorphism type of
// the orthogonal complement, so the product over one chain of choices equals
// the total.  Guard: #G <= 2^20.  Memoized; optionally persisted to disk.
class SpOrderCache {
  public:
    BigInt sp_order(const SymplecticType& G);

    void set_cache_path(std::string path); // empty disables persistence
    const std::string& cache_path() const { return path_; }
    void clear();

  private:
    BigInt compute(const SymplecticType& G) const;
    void load_locked();
    void append_locked(const std::string& key, const BigInt& value);

    mutable std::shared_mutex mu_;
    std::map<std::string, BigInt> memo_;
    std::string path_;
    bool loaded_ = false;
};

BigInt sp_order_bruteforce(const SymplecticType& G); // full DFS, tiny groups only

// Heuristic mass w_G = #G / #Sp(G) of a symplectic group.
BigRat w_weight(const SymplecticType& G, SpOrderCache& cache);

// p^{-k} prod_{j=1}^k (1 - p^{-2j})^{-1}: the closed form for
// sum over #G = p^{2k} of w_G.
BigRat w_sum_exact(uint64_t p, uint32_t k);

// All symplectic types of order p^{2k}: doubled partitions of k.
std::vector<SymplecticType> symplectic_types_of_size(uint64_t p, uint32_t k);

// #Surj(Z_p^n, G) = (#G)^n prod_{i=0}^{d-1} (1 - p^{i-n}), d = dim G[p].
BigInt surjection_count(const SymplecticType& G, uint32_t n);

// Finite-n law of coker(A) for Haar alternating n x n matrices:
// #Surj(Z_p^n,G)/#Sp(G) * gl_alt_ratio(n - d, p) * (#G)^{1-n}.
BigRat pi_finite(const SymplecticType& G, uint32_t n, SpOrderCache& cache);

// Limit law on the corank-r stratum: (#G)^{1-r}/#Sp(G) * prod_{i>r}(1-p^{1-2i}).
struct ApproxProb {
    double value;
    double tail; // multiplicative lower-tail bound
};
ApproxProb pi_limit(const SymplecticType& G, uint32_t r, SpOrderCache& cache);

// Finite-n law on the corank-r stratum:
// (#G)^{-r} * pi_finite(G, n-r) / igusa(n-r, r).
BigRat stratum_finite(const SymplecticType& G, uint32_t n, uint32_t r, SpOrderCache& cache);

// Average of |det|^s over alternating n x n matrices (n even):
// prod_{i=1}^{n/2} (1-p^{1-2i})/(1-p^{1-2i-2s}).
BigRat igusa(uint32_t n, uint32_t s, uint64_t p);

// #OGr_n(Z/qZ) = q^{n(n-1)/2} prod_{i=1}^n (1 + p^{i-n}), q = p^e.
BigInt ogr_count(uint32_t n, uint64_t p, uint32_t e);

// Average number of injections (Z/q)^m -> Z intersect W over OGr pairs:
// q^{m(m+1)/2} prod_{i=0}^{m-1}(1-p^{i-n}) / prod_{i=n-m}^{n-1}(1+p^{-i}),
// tending to q^{m(m+1)/2}.
BigRat moment_finite(uint32_t m, uint32_t n, uint64_t p, uint32_t e);
BigInt moment_limit(uint32_t m, uint64_t p, uint32_t e);

// Number of injective homomorphisms (Z/q)^m -> G, by enumeration.
BigInt count_injections(const Partition& G, uint32_t m, uint64_t p, uint32_t e);

// Same count through the kernel/image structure of x -> p^{e-1}x; validated
// against the enumeration and cheap enough for the Monte Carlo loop.
BigInt injection_count_closed(const Partition& G, uint32_t m, uint64_t p, uint32_t e);

// Prob([,]_A = [,]_D) for D in standard block form with half-exponents e:
// gl_alt_ratio(m, p) * |det D|^{n-1}, m = 2 #{e_i = 0}.
BigRat prob_same_pairing(const std::vector<uint32_t>& e_half, uint32_t n, uint64_t p);

// 1 - prod_{i=r+1}^inf (1 - p^{1-2i}).
ApproxProb prob_nonzero_T(uint32_t r, uint64_t p);

inline int64_t schubert_dim(int64_t n, int64_t r) { return (n - r) * (n + r - 1) / 2; }
inline int64_t stratum_dim(int64_t n, int64_t r) {
    return n * (n - 1) / 2 - r * (r - 1) / 2;
}

double to_double(const BigRat& r);

} // namespace isoclass
