#include "alt.hpp"

#include "exact.hpp"

namespace isoclass {

MatModQ AltMat::to_mat(const PadicCtx& ctx) const {
    MatModQ M(n_, n_);
    for (size_t i = 0; i < n_; i++)
        for (size_t j = i + 1; j < n_; j++) {
            uint64_t v = upper_[idx(i, j)];
            M.at(i, j) = v;
            M.at(j, i) = ctx.neg(v);
        }
    return M;
}

AltMat sample_alt_haar(size_t n, const PadicCtx& ctx, Rng& rng) {
    // Digit-plane order: re-running the same seed at a higher precision
    // yields a matrix that reduces to this one mod p^E, which is what lets
    // precision escalation refine a sample instead of redrawing it.
    AltMat A(n);
    uint64_t pd = 1;
    for (uint32_t d = 0; d < ctx.E(); d++) {
        for (auto& x : A.raw()) x += pd * rng.below(ctx.p());
        pd *= ctx.p();
    }
    return A;
}

StratumSample sample_alt_stratum(size_t n, uint32_t r, const PadicCtx& ctx, Rng& rng,
                                 bool build_full) {
    if (r > n || (n - r) % 2 != 0)
        fail(errc::invalid_argument, "stratum requires 0 <= r <= n with n-r even");
    const size_t m = n - r;
    StratumSample out;
    for (;;) {
        out.core = sample_alt_haar(m, ctx, rng);
        CokernelShape shape = cokernel_shape(out.core.to_mat(ctx), ctx);
        uint64_t v = shape.tors.exp_sum();
        if (shape.free_rank > 0 || v >= ctx.E()) {
            // det core == 0 mod p^E.  The determinant is a Pfaffian square,
            // so this carries mass ~ p^{-E/2}: with no |det|^r reweighting the
            // sample must escalate to higher precision, not be redrawn.  For
            // r >= 1 the weight of such cores is <= p^{-rE}, and redrawing is
            // the rejection step itself.
            out.boundary_resamples++;
            if (r == 0) {
                out.core_shape = shape;
                out.core_shape.resolved = false;
                out.det_val = ctx.E();
                return out;
            }
            continue;
        }
        if (r > 0 && v > 0) {
            // Accept with probability p^{-r*v}: r*v independent digits, all zero.
            bool ok = true;
            for (uint64_t t = 0; t < uint64_t(r) * v && ok; t++)
                ok = rng.below(ctx.p()) == 0;
            if (!ok) continue;
        }
        out.det_val = uint32_t(v);
        shape.free_rank = r;
        out.core_shape = shape;
        break;
    }
    if (build_full) {
        MatModQ M = sample_unimodular(n, ctx, rng);
        MatModQ B(n, n);
        for (size_t i = 0; i < m; i++)
            for (size_t j = 0; j < m; j++) B.at(i, j) = out.core.entry(i, j, ctx);
        MatModQ full = mat_mul(mat_mul(mat_transpose(M), B, ctx), M, ctx);
        out.A = AltMat(n);
        for (size_t i = 0; i < n; i++)
            for (size_t j = i + 1; j < n; j++) out.A.upper(i, j) = full.at(i, j);
    }
    return out;
}

CokernelShape coker_tors_sample(size_t n, uint32_t r, const PadicCtx& ctx, Rng& rng,
                                uint64_t* boundary_resamples) {
    StratumSample s = sample_alt_stratum(n, r, ctx, rng, /*build_full=*/false);
    if (boundary_resamples) *boundary_resamples += s.boundary_resamples;
    return s.core_shape;
}

PairingValue reduce_pairing(uint64_t num, uint32_t k, const PadicCtx& ctx) {
    num %= ctx.pow_p(k);
    if (num == 0) return {0, 0};
    while (k > 0 && num % ctx.p() == 0) {
        num /= ctx.p();
        k--;
    }
    return {num, k};
}

PairingValue pairing_add(PairingValue a, PairingValue b, const PadicCtx& ctx) {
    uint32_t k = std::max(a.k, b.k);
    uint64_t pk = ctx.pow_p(k);
    uint64_t num = (a.num % pk) * (pk / ctx.pow_p(a.k)) % pk;
    num = (num + (b.num % pk) * (pk / ctx.pow_p(b.k))) % pk;
    return reduce_pairing(num, k, ctx);
}

PairingValue pairing_neg(PairingValue a, const PadicCtx& ctx) {
    if (a.num == 0) return a;
    return {ctx.pow_p(a.k) - a.num, a.k};
}

CokernelPairing::CokernelPairing(const AltMat& A, const PadicCtx& ctx) : ctx_(ctx) {
    SnfResult s = smith_normal_form(A.to_mat(ctx), ctx);
    uint64_t vsum = 0;
    for (uint32_t e : s.exps) vsum += e;
    if (vsum >= ctx.E())
        fail(errc::singular_matrix, "cokernel pairing requires det != 0 mod p^E");
    exps_ = s.exps;
    Vt_ = mat_transpose(s.V);
    U_ = std::move(s.U);
    Uinv_ = std::move(s.Uinv);
}

PairingValue CokernelPairing::eval(const std::vector<uint64_t>& x,
                                   const std::vector<uint64_t>& y) const {
    std::vector<uint64_t> t1 = mat_vec(Vt_, x, ctx_);
    std::vector<uint64_t> t2 = mat_vec(U_, y, ctx_);
    uint32_t kmax = 0;
    for (uint32_t e : exps_) kmax = std::max(kmax, e);
    uint64_t pk = ctx_.pow_p(kmax);
    uint64_t num = 0;
    for (size_t i = 0; i < exps_.size(); i++) {
        uint64_t term = (__uint128_t)(t1[i] % pk) * (t2[i] % pk) % pk;
        term = (__uint128_t)term * (pk / ctx_.pow_p(exps_[i])) % pk;
        num = (num + term) % pk;
    }
    return reduce_pairing(num, kmax, ctx_);
}

std::vector<uint64_t> CokernelPairing::class_rep(const std::vector<uint64_t>& coords) const {
    return mat_vec(Uinv_, coords, ctx_);
}

PairingValue cokernel_pairing(const AltMat& A, const std::vector<uint64_t>& x,
                              const std::vector<uint64_t>& y, const PadicCtx& ctx) {
    return CokernelPairing(A, ctx).eval(x, y);
}

namespace {

MatQ alt_lift(const AltMat& A) {
    // Canonical alternating integer lift: upper entries in [0, p^E), lower
    // entries their negatives.
    MatQ L(A.n(), A.n());
    for (size_t i = 0; i < A.n(); i++)
        for (size_t j = i + 1; j < A.n(); j++) {
            BigInt v = A.upper(i, j);
            L.at(i, j) = v;
            L.at(j, i) = -v;
        }
    return L;
}

} // namespace

bool same_pairing(const AltMat& A, const AltMat& D, const PadicCtx& ctx) {
    if (A.n() != D.n()) fail(errc::invalid_argument, "same_pairing size mismatch");
    const uint64_t p = ctx.p();
    MatQ La = alt_lift(A), Ld = alt_lift(D);

    MatQ Dinv = MatQ::identity(D.n());
    BigRat detD = Ld.det();
    if (detD == 0 || val_p_big(boost::multiprecision::numerator(detD), p) >= ctx.E())
        fail(errc::singular_matrix, "same_pairing: D singular mod p^E");
    Ld.invert(Dinv);

    // Way 1: det A != 0 at precision and A^{-1} - D^{-1} p-integral.
    bool way1 = false;
    BigRat detA = La.det();
    if (detA != 0 && val_p_big(boost::multiprecision::numerator(detA), p) < ctx.E()) {
        MatQ Ainv = MatQ::identity(A.n());
        La.invert(Ainv);
        way1 = Ainv.sub(Dinv).p_integral(p);
    }

    // Way 2: A in D + D M_n(Z_p) D with matching rank mod p.
    MatQ N = Dinv.mul(La.sub(Ld)).mul(Dinv);
    bool way2 = N.p_integral(p) &&
                rank_mod_p(A.to_mat(ctx), ctx) == rank_mod_p(D.to_mat(ctx), ctx);

    if (way1 != way2)
        fail(errc::internal, "same_pairing: the two characterizations disagree");
    return way1;
}

AltMat standard_alt(const std::vector<uint32_t>& e_half, const PadicCtx& ctx) {
    const size_t h = e_half.size(), n = 2 * h;
    AltMat D(n);
    for (size_t i = 0; i < h; i++) {
        if (e_half[i] >= ctx.E())
            fail(errc::invalid_argument, "standard_alt: exponent >= E");
        D.upper(i, h + i) = ctx.pow_p(e_half[i]);
    }
    return D;
}

bool same_pairing_standard(const AltMat& A, const std::vector<uint32_t>& e_half,
                           const PadicCtx& ctx) {
    const size_t h = e_half.size(), n = 2 * h;
    if (A.n() != n) fail(errc::invalid_argument, "same_pairing_standard size mismatch");
    std::vector<uint32_t> e(n);
    uint32_t emax = 0;
    for (size_t i = 0; i < h; i++) {
        e[i] = e[h + i] = e_half[i];
        emax = std::max(emax, e_half[i]);
    }
    if (2 * emax >= ctx.E())
        fail(errc::invalid_argument, "same_pairing_standard: needs E > 2*max(e)");
    AltMat D = standard_alt(e_half, ctx);
    for (size_t i = 0; i < n; i++)
        for (size_t j = i + 1; j < n; j++) {
            uint64_t mod = ctx.pow_p(e[i] + e[j]);
            if ((A.upper(i, j) + ctx.q() - D.upper(i, j)) % mod != 0) return false;
        }
    size_t m = 0;
    for (size_t i = 0; i < h; i++)
        if (e_half[i] == 0) m += 2;
    return rank_mod_p(A.to_mat(ctx), ctx) == m;
}

double prob_pairing_match_mc(const std::vector<uint32_t>& e_half, size_t n,
                             const PadicCtx& ctx, uint64_t trials, uint64_t seed) {
    if (n != 2 * e_half.size())
        fail(errc::invalid_argument, "prob_pairing_match_mc: n must equal 2*|e|");
    uint64_t hits = 0;
    for (uint64_t t = 0; t < trials; t++) {
        Rng rng(derive_seed(seed, t));
        AltMat A = sample_alt_haar(n, ctx, rng);
        if (same_pairing_standard(A, e_half, ctx)) hits++;
    }
    return double(hits) / double(trials);
}

Partition symplectic_divisors(const AltMat& A, const PadicCtx& ctx) {
    CokernelShape shape = cokernel_shape(A.to_mat(ctx), ctx);
    if (!shape.resolved)
        fail(errc::unresolved_precision, "symplectic_divisors: unresolved cokernel shape");
    if (!shape.tors.even_multiplicities())
        fail(errc::internal, "alternating cokernel with odd exponent multiplicity");
    return shape.tors;
}

} // namespace isoclass
