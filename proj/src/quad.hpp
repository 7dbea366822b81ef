#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alt.hpp"
#include "mat.hpp"

namespace isoclass {

// The rank-2n free module over Z/p^E carrying Q(x_1..x_n,y_1..y_n) = sum x_i y_i.
struct HyperbolicSpace {
    size_t n;
    PadicCtx ctx;

    HyperbolicSpace(size_t n_, const PadicCtx& c) : n(n_), ctx(c) {}
    size_t dim() const { return 2 * n; }
};

uint64_t q_eval(const std::vector<uint64_t>& v, const HyperbolicSpace& sp);
uint64_t inner(const std::vector<uint64_t>& u, const std::vector<uint64_t>& v,
               const HyperbolicSpace& sp);

// Rank-n direct summand on which Q vanishes, held as a 2n x n basis matrix in
// canonical column-reduced form: pivot rows (greedy top-down) carry an
// identity block, so equal summands have equal representations.
class IsotropicSummand {
  public:
    IsotropicSummand() = default;

    // Canonicalizes; raises internal error when the columns do not span a
    // direct summand (no unit pivot available for some column).
    static IsotropicSummand from_basis(MatModQ basis, const HyperbolicSpace& sp);

    // The standard first-factor summand (Z/p^E)^n x 0.
    static IsotropicSummand standard_w(const HyperbolicSpace& sp);
    // The standard complement 0 x (Z/p^E)^n.
    static IsotropicSummand standard_w_complement(const HyperbolicSpace& sp);
    // Graph of an alternating map into the complement: columns (a, A a).
    static IsotropicSummand graph_over_w(const AltMat& A, const HyperbolicSpace& sp);

    const MatModQ& basis() const { return basis_; }
    const std::vector<size_t>& pivot_rows() const { return pivots_; }
    bool operator==(const IsotropicSummand&) const = default;

    // Q = 0 on all columns and the polarization vanishes on all column pairs.
    bool is_isotropic(const HyperbolicSpace& sp) const;

    IsotropicSummand reduced(const HyperbolicSpace& sp_to) const;

  private:
    MatModQ basis_;
    std::vector<size_t> pivots_;
};

// Uniform over OGr_n(F_p): repeatedly draw a uniform vector, keep it when it
// is isotropic, orthogonal to the chosen ones, and independent of them.
IsotropicSummand sample_ogr_mod_p(const HyperbolicSpace& sp, Rng& rng);

// Uniform lift from precision e to e+1 (basis entries of Z must be reduced
// mod p^e).  The fiber is a torsor under alternating n x n matrices mod p.
IsotropicSummand lift_ogr(const IsotropicSummand& Z, uint32_t e,
                          const HyperbolicSpace& sp, Rng& rng);

// Mod-p sample composed with E-1 uniform lifts: reduction mod p^k is uniform
// for every k <= E.
IsotropicSummand sample_ogr(const HyperbolicSpace& sp, Rng& rng);

// Abelian-group structure of (Z mod p^k) intersect (W mod p^k) in V/p^k.
Partition intersect(const IsotropicSummand& Z, const IsotropicSummand& W,
                    const HyperbolicSpace& sp, uint32_t k);

// Free rank r of Z intersect W and the finite quotient T, certified by the
// two-point stabilization rule comparing intersection structure at precisions
// E-1 and E: exponents tracking the precision are rank; the rest must agree
// between the two levels and stay <= E-2, otherwise resolved = false.
struct RankTorsion {
    uint32_t r = 0;
    Partition T;
    bool resolved = false;
};

RankTorsion rank_torsion_extract(const IsotropicSummand& Z, const IsotropicSummand& W,
                                 const HyperbolicSpace& sp);

// Elements of S[p^k] = (Z mod p^k) intersect (W mod p^k): generators plus the
// sublattice representing classes killed by the divisible part (reduction of
// the level-2k intersection).  Requires 2k <= E.
struct TorsionLevel {
    uint32_t k = 0;
    std::vector<std::vector<uint64_t>> gens;        // generators of S[p^k]
    std::vector<uint32_t> gen_orders;               // p-power exponents
    std::vector<std::vector<uint64_t>> divisible;   // generators of the R-part
};

TorsionLevel torsion_level(const IsotropicSummand& Z, const IsotropicSummand& W,
                           const HyperbolicSpace& sp, uint32_t k);

// Model pairing Q(z_x - w_y) mod 1 on T, for x, y in S[p^k] given as vectors
// mod p^k.  relift_salt varies the lift choices; the value must not depend on
// it.  Requires 2k <= E.  NotInS when x or y fails membership.
PairingValue ct_pairing(const IsotropicSummand& Z, const IsotropicSummand& W,
                        const std::vector<uint64_t>& x, const std::vector<uint64_t>& y,
                        uint32_t k, const HyperbolicSpace& sp, uint64_t relift_salt = 0);

// All maximal isotropic direct summands of (Z/q)^{2n}, q = p^e, in canonical
// form.  Guard: at most 10^7 candidate reduced bases.
std::vector<IsotropicSummand> enumerate_ogr(size_t n, uint64_t p, uint32_t e);

// Parity of dim_{F_p}(Z mod p intersect W mod p): 0 = even component.
int component_sign(const IsotropicSummand& Z, const HyperbolicSpace& sp);

} // namespace isoclass
