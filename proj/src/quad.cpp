#include "quad.hpp"

#include <algorithm>

namespace isoclass {

uint64_t q_eval(const std::vector<uint64_t>& v, const HyperbolicSpace& sp) {
    if (v.size() != sp.dim()) fail(errc::invalid_argument, "q_eval: wrong length");
    uint64_t s = 0;
    for (size_t i = 0; i < sp.n; i++)
        s = sp.ctx.add(s, sp.ctx.mul(v[i] % sp.ctx.q(), v[sp.n + i] % sp.ctx.q()));
    return s;
}

uint64_t inner(const std::vector<uint64_t>& u, const std::vector<uint64_t>& v,
               const HyperbolicSpace& sp) {
    if (u.size() != sp.dim() || v.size() != sp.dim())
        fail(errc::invalid_argument, "inner: wrong length");
    uint64_t s = 0;
    for (size_t i = 0; i < sp.n; i++) {
        s = sp.ctx.add(s, sp.ctx.mul(u[i] % sp.ctx.q(), v[sp.n + i] % sp.ctx.q()));
        s = sp.ctx.add(s, sp.ctx.mul(u[sp.n + i] % sp.ctx.q(), v[i] % sp.ctx.q()));
    }
    return s;
}

namespace {

std::vector<uint64_t> column(const MatModQ& M, size_t j) {
    std::vector<uint64_t> c(M.rows());
    for (size_t i = 0; i < M.rows(); i++) c[i] = M.at(i, j);
    return c;
}

} // namespace

IsotropicSummand IsotropicSummand::from_basis(MatModQ basis, const HyperbolicSpace& sp) {
    const PadicCtx& ctx = sp.ctx;
    const size_t rows = sp.dim(), n = sp.n;
    if (basis.rows() != rows || basis.cols() != n)
        fail(errc::invalid_argument, "summand basis must be 2n x n");
    for (auto& x : basis.data()) x %= ctx.q();

    std::vector<size_t> pivot_of_col(n, size_t(-1));
    std::vector<bool> used(n, false);
    std::vector<size_t> pivots;
    for (size_t r = 0; r < rows && pivots.size() < n; r++) {
        size_t c = n;
        for (size_t j = 0; j < n; j++)
            if (!used[j] && ctx.is_unit(basis.at(r, j))) {
                c = j;
                break;
            }
        if (c == n) continue;
        uint64_t inv = ctx.unit_inv(basis.at(r, c));
        for (size_t i = 0; i < rows; i++) basis.at(i, c) = ctx.mul(basis.at(i, c), inv);
        for (size_t j = 0; j < n; j++) {
            if (j == c) continue;
            uint64_t f = basis.at(r, j);
            if (!f) continue;
            for (size_t i = 0; i < rows; i++)
                basis.at(i, j) = ctx.sub(basis.at(i, j), ctx.mul(f, basis.at(i, c)));
        }
        used[c] = true;
        pivot_of_col[c] = r;
        pivots.push_back(r);
    }
    if (pivots.size() != n)
        fail(errc::internal, "summand basis is not a direct summand (no unit minor)");

    // Columns ordered by ascending pivot row.
    std::vector<size_t> order;
    for (size_t j = 0; j < n; j++) order.push_back(j);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return pivot_of_col[a] < pivot_of_col[b]; });
    IsotropicSummand out;
    out.basis_ = MatModQ(rows, n);
    for (size_t k = 0; k < n; k++)
        for (size_t i = 0; i < rows; i++) out.basis_.at(i, k) = basis.at(i, order[k]);
    out.pivots_ = pivots;
    return out;
}

IsotropicSummand IsotropicSummand::standard_w(const HyperbolicSpace& sp) {
    MatModQ B(sp.dim(), sp.n);
    for (size_t i = 0; i < sp.n; i++) B.at(i, i) = 1;
    return from_basis(std::move(B), sp);
}

IsotropicSummand IsotropicSummand::standard_w_complement(const HyperbolicSpace& sp) {
    MatModQ B(sp.dim(), sp.n);
    for (size_t i = 0; i < sp.n; i++) B.at(sp.n + i, i) = 1;
    return from_basis(std::move(B), sp);
}

IsotropicSummand IsotropicSummand::graph_over_w(const AltMat& A, const HyperbolicSpace& sp) {
    if (A.n() != sp.n) fail(errc::invalid_argument, "graph_over_w: size mismatch");
    MatModQ B(sp.dim(), sp.n);
    for (size_t i = 0; i < sp.n; i++) B.at(i, i) = 1;
    for (size_t i = 0; i < sp.n; i++)
        for (size_t j = 0; j < sp.n; j++) B.at(sp.n + i, j) = A.entry(i, j, sp.ctx);
    return from_basis(std::move(B), sp);
}

bool IsotropicSummand::is_isotropic(const HyperbolicSpace& sp) const {
    for (size_t j = 0; j < basis_.cols(); j++) {
        auto cj = column(basis_, j);
        if (q_eval(cj, sp) != 0) return false;
        for (size_t i = 0; i < j; i++)
            if (inner(column(basis_, i), cj, sp) != 0) return false;
    }
    return true;
}

IsotropicSummand IsotropicSummand::reduced(const HyperbolicSpace& sp_to) const {
    return from_basis(basis_.reduced(sp_to.ctx), sp_to);
}

IsotropicSummand sample_ogr_mod_p(const HyperbolicSpace& sp, Rng& rng) {
    const uint64_t p = sp.ctx.p();
    PadicCtx fp(p, 1);
    HyperbolicSpace sp1(sp.n, fp);
    const size_t dim = sp.dim();

    std::vector<std::vector<uint64_t>> chosen, echelon;
    std::vector<size_t> lead;
    auto reduce = [&](std::vector<uint64_t> v) {
        for (size_t i = 0; i < echelon.size(); i++) {
            uint64_t f = v[lead[i]];
            if (!f) continue;
            for (size_t j = 0; j < dim; j++) v[j] = fp.sub(v[j], fp.mul(f, echelon[i][j]));
        }
        return v;
    };

    std::vector<uint64_t> v(dim);
    while (chosen.size() < sp.n) {
        for (auto& x : v) x = rng.below(p);
        if (q_eval(v, sp1) != 0) continue;
        bool orth = true;
        for (const auto& z : chosen)
            if (inner(v, z, sp1) != 0) {
                orth = false;
                break;
            }
        if (!orth) continue;
        std::vector<uint64_t> w = reduce(v);
        size_t l = 0;
        while (l < dim && w[l] == 0) l++;
        if (l == dim) continue; // dependent on the span so far
        uint64_t inv = fp.unit_inv(w[l]);
        for (auto& x : w) x = fp.mul(x, inv);
        chosen.push_back(v);
        echelon.push_back(std::move(w));
        lead.push_back(l);
    }

    MatModQ B(dim, sp.n);
    for (size_t j = 0; j < sp.n; j++)
        for (size_t i = 0; i < dim; i++) B.at(i, j) = chosen[j][i];
    return IsotropicSummand::from_basis(std::move(B), sp1);
}

IsotropicSummand lift_ogr(const IsotropicSummand& Z, uint32_t e,
                          const HyperbolicSpace& sp, Rng& rng) {
    const uint64_t p = sp.ctx.p();
    const size_t n = sp.n, dim = sp.dim();
    if (e < 1 || e + 1 > sp.ctx.E()) fail(errc::invalid_argument, "lift_ogr: bad level");
    PadicCtx ctx1(p, e + 1);
    HyperbolicSpace sp1(n, ctx1);
    const uint64_t pe = ctx1.pow_p(e);

    MatModQ B = Z.basis().reduced(ctx1);

    // Defects of the straight lift, all divisible by p^e when the input is
    // isotropic at level e.
    std::vector<uint64_t> d(n);
    std::vector<std::vector<uint64_t>> c(n, std::vector<uint64_t>(n, 0));
    for (size_t i = 0; i < n; i++) {
        uint64_t qv = q_eval(column(B, i), sp1);
        if (qv % pe != 0) fail(errc::internal, "lift_ogr: input not isotropic");
        d[i] = qv / pe;
        for (size_t j = i + 1; j < n; j++) {
            uint64_t iv = inner(column(B, i), column(B, j), sp1);
            if (iv % pe != 0) fail(errc::internal, "lift_ogr: input not isotropic");
            c[i][j] = iv / pe;
        }
    }

    // Dual vectors y_j with <b_i, y_j> = delta_ij mod p, via row reduction of
    // the n x 2n functional matrix G = B^t J.
    PadicCtx fp(p, 1);
    std::vector<std::vector<uint64_t>> G(n, std::vector<uint64_t>(dim));
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < dim; j++) {
            size_t partner = j < n ? n + j : j - n;
            G[i][j] = B.at(partner, i) % p;
        }
    std::vector<std::vector<uint64_t>> T(n, std::vector<uint64_t>(n, 0));
    for (size_t i = 0; i < n; i++) T[i][i] = 1;
    std::vector<size_t> pivcol(n);
    {
        size_t row = 0;
        for (size_t col = 0; col < dim && row < n; col++) {
            size_t piv = row;
            while (piv < n && G[piv][col] == 0) piv++;
            if (piv == n) continue;
            std::swap(G[piv], G[row]);
            std::swap(T[piv], T[row]);
            uint64_t inv = fp.unit_inv(G[row][col]);
            for (auto& x : G[row]) x = x * inv % p;
            for (auto& x : T[row]) x = x * inv % p;
            for (size_t i2 = 0; i2 < n; i2++) {
                if (i2 == row) continue;
                uint64_t f = G[i2][col];
                if (!f) continue;
                for (size_t j2 = 0; j2 < dim; j2++)
                    G[i2][j2] = fp.sub(G[i2][j2], fp.mul(f, G[row][j2]));
                for (size_t j2 = 0; j2 < n; j2++)
                    T[i2][j2] = fp.sub(T[i2][j2], fp.mul(f, T[row][j2]));
            }
            pivcol[row] = col;
            row++;
        }
        if (row != n) fail(errc::internal, "lift_ogr: dual system is singular");
    }
    // Solution of G y = e_j: put (T e_j)_i at pivot column i.
    std::vector<std::vector<uint64_t>> y(n, std::vector<uint64_t>(dim, 0));
    for (size_t j = 0; j < n; j++)
        for (size_t i = 0; i < n; i++) y[j][pivcol[i]] = T[i][j];

    // Correction coefficients: t_ii = -d_i; for i<j the residual freedom is an
    // alternating matrix mod p: t_ij = s_ij, t_ji = -c_ij - s_ij.
    std::vector<std::vector<uint64_t>> t(n, std::vector<uint64_t>(n, 0));
    for (size_t i = 0; i < n; i++) t[i][i] = (p - d[i] % p) % p;
    for (size_t i = 0; i < n; i++)
        for (size_t j = i + 1; j < n; j++) {
            uint64_t s = rng.below(p);
            t[i][j] = s;
            t[j][i] = (2 * p - c[i][j] % p - s) % p;
        }

    for (size_t i = 0; i < n; i++)
        for (size_t row = 0; row < dim; row++) {
            uint64_t u = 0;
            for (size_t j = 0; j < n; j++) u = (u + t[i][j] * y[j][row]) % p;
            B.at(row, i) = ctx1.add(B.at(row, i), ctx1.mul(pe, u));
        }
    return IsotropicSummand::from_basis(std::move(B), sp1);
}

IsotropicSummand sample_ogr(const HyperbolicSpace& sp, Rng& rng) {
    if (sp.n == 0) {
        MatModQ B(0, 0);
        return IsotropicSummand::from_basis(std::move(B), sp);
    }
    IsotropicSummand Z = sample_ogr_mod_p(sp, rng);
    for (uint32_t e = 1; e < sp.ctx.E(); e++) Z = lift_ogr(Z, e, sp, rng);
    return Z;
}

namespace {

// Generators of (Z mod p^k) intersect (W mod p^k) as independent cyclic
// factors: vectors g_i of order p^{orders[i]}.
struct IntersectionGens {
    std::vector<std::vector<uint64_t>> gens;
    std::vector<uint32_t> orders;
};

IntersectionGens intersection_generators(const IsotropicSummand& Z,
                                         const IsotropicSummand& W,
                                         const HyperbolicSpace& sp, uint32_t k) {
    PadicCtx ctxk = sp.ctx.with_precision(k);
    const size_t n = sp.n, dim = sp.dim();
    IntersectionGens out;
    if (n == 0) return out;
    MatModQ BZ = Z.basis().reduced(ctxk), BW = W.basis().reduced(ctxk);
    MatModQ M(dim, 2 * n);
    for (size_t i = 0; i < dim; i++)
        for (size_t j = 0; j < n; j++) {
            M.at(i, j) = BZ.at(i, j);
            M.at(i, n + j) = ctxk.neg(BW.at(i, j));
        }
    SnfResult s = smith_normal_form(M, ctxk);

    // Kernel of M mod p^k: columns p^{max(k-e,0)} * V e_i; their a-parts span
    // the coefficient module of the intersection.
    std::vector<std::vector<uint64_t>> coeffs;
    for (size_t i = 0; i < 2 * n; i++) {
        uint32_t e = i < s.exps.size() ? s.exps[i] : 0;
        if (e == 0) continue;
        uint64_t w = ctxk.pow_p(k - std::min(e, k));
        std::vector<uint64_t> a(n);
        for (size_t row = 0; row < n; row++) a[row] = ctxk.mul(s.V.at(row, i), w);
        coeffs.push_back(std::move(a));
    }
    if (coeffs.empty()) return out;

    MatModQ G(dim, coeffs.size());
    for (size_t j = 0; j < coeffs.size(); j++) {
        std::vector<uint64_t> g = mat_vec(BZ, coeffs[j], ctxk);
        for (size_t i = 0; i < dim; i++) G.at(i, j) = g[i];
    }
    SnfResult im = smith_normal_form(G, ctxk);
    for (size_t i = 0; i < im.exps.size(); i++) {
        uint32_t f = im.exps[i];
        if (f >= k) continue;
        uint64_t w = ctxk.pow_p(f);
        std::vector<uint64_t> g(dim);
        for (size_t row = 0; row < dim; row++) g[row] = ctxk.mul(im.Uinv.at(row, i), w);
        out.gens.push_back(std::move(g));
        out.orders.push_back(k - f);
    }
    return out;
}

} // namespace

Partition intersect(const IsotropicSummand& Z, const IsotropicSummand& W,
                    const HyperbolicSpace& sp, uint32_t k) {
    if (k < 1 || k > sp.ctx.E()) fail(errc::invalid_argument, "intersect: bad precision");
    IntersectionGens ig = intersection_generators(Z, W, sp, k);
    std::vector<uint32_t> exps = ig.orders;
    return Partition(std::move(exps));
}

RankTorsion rank_torsion_extract(const IsotropicSummand& Z, const IsotropicSummand& W,
                                 const HyperbolicSpace& sp) {
    const uint32_t E = sp.ctx.E();
    if (E < 3) fail(errc::invalid_argument, "rank_torsion_extract requires E >= 3");
    std::vector<uint32_t> hi = intersect(Z, W, sp, E).exps();
    std::vector<uint32_t> lo = intersect(Z, W, sp, E - 1).exps();
    size_t L = std::max(hi.size(), lo.size());
    hi.resize(L, 0);
    lo.resize(L, 0);

    RankTorsion out;
    out.resolved = true;
    size_t i = 0;
    while (i < L && hi[i] == E && lo[i] == E - 1) {
        out.r++;
        i++;
    }
    std::vector<uint32_t> T;
    for (; i < L; i++) {
        if (hi[i] != lo[i] || hi[i] > E - 2) {
            out.resolved = false;
            if (hi[i] > 0) T.push_back(std::min(hi[i], E - 2)); // best effort
            continue;
        }
        if (hi[i] > 0) T.push_back(hi[i]);
    }
    out.T = Partition(std::move(T));
    return out;
}

TorsionLevel torsion_level(const IsotropicSummand& Z, const IsotropicSummand& W,
                           const HyperbolicSpace& sp, uint32_t k) {
    if (2 * k > sp.ctx.E())
        fail(errc::invalid_argument, "torsion_level requires 2k <= E");
    TorsionLevel out;
    out.k = k;
    IntersectionGens ig = intersection_generators(Z, W, sp, k);
    out.gens = std::move(ig.gens);
    out.gen_orders = std::move(ig.orders);
    IntersectionGens big = intersection_generators(Z, W, sp, 2 * k);
    uint64_t pk = sp.ctx.with_precision(k).q();
    for (auto& g : big.gens) {
        std::vector<uint64_t> r(g.size());
        bool nonzero = false;
        for (size_t i = 0; i < g.size(); i++) {
            r[i] = g[i] % pk;
            nonzero |= r[i] != 0;
        }
        if (nonzero) out.divisible.push_back(std::move(r));
    }
    return out;
}

PairingValue ct_pairing(const IsotropicSummand& Z, const IsotropicSummand& W,
                        const std::vector<uint64_t>& x, const std::vector<uint64_t>& y,
                        uint32_t k, const HyperbolicSpace& sp, uint64_t relift_salt) {
    const PadicCtx& ctx = sp.ctx;
    if (2 * k > ctx.E()) fail(errc::invalid_argument, "ct_pairing requires 2k <= E");
    PadicCtx ctxk = ctx.with_precision(k);
    PadicCtx ctx2k = ctx.with_precision(2 * k);
    HyperbolicSpace sp2k(sp.n, ctx2k);

    auto solve_in = [&](const IsotropicSummand& S, const std::vector<uint64_t>& v,
                        std::vector<uint64_t>& a) {
        std::vector<uint64_t> vk(v.size());
        for (size_t i = 0; i < v.size(); i++) vk[i] = v[i] % ctxk.q();
        return solve_linear(S.basis().reduced(ctxk), vk, ctxk, a);
    };

    std::vector<uint64_t> az, aw, tmp;
    if (!solve_in(Z, x, az) || !solve_in(W, x, tmp))
        fail(errc::not_in_span, "ct_pairing: x not in S[p^k]");
    if (!solve_in(W, y, aw) || !solve_in(Z, y, tmp))
        fail(errc::not_in_span, "ct_pairing: y not in S[p^k]");

    if (relift_salt) {
        Rng rs(relift_salt);
        uint64_t span = ctx2k.q() / ctxk.q();
        for (auto& v : az) v = (v + ctxk.q() * rs.below(span)) % ctx2k.q();
        for (auto& v : aw) v = (v + ctxk.q() * rs.below(span)) % ctx2k.q();
    }

    std::vector<uint64_t> zx = mat_vec(Z.basis().reduced(ctx2k), az, ctx2k);
    std::vector<uint64_t> wy = mat_vec(W.basis().reduced(ctx2k), aw, ctx2k);
    std::vector<uint64_t> diff(zx.size());
    for (size_t i = 0; i < zx.size(); i++) diff[i] = ctx2k.sub(zx[i], wy[i]);
    PairingValue v = reduce_pairing(q_eval(diff, sp2k), 2 * k, ctx);
    if (v.k > k) fail(errc::internal, "ct_pairing: denominator exceeds p^k");
    return v;
}

std::vector<IsotropicSummand> enumerate_ogr(size_t n, uint64_t p, uint32_t e) {
    PadicCtx ctx(p, e);
    HyperbolicSpace sp(n, ctx);
    const size_t dim = 2 * n;
    const uint64_t q = ctx.q();

    if (n == 0) {
        MatModQ B(0, 0);
        return {IsotropicSummand::from_basis(std::move(B), sp)};
    }

    // Candidate canonical bases: pivot rows carry the identity; an entry at a
    // non-pivot row r in a column whose pivot row lies below r must be
    // divisible by p (greedy pivot rule).
    std::vector<size_t> comb(n);
    for (size_t i = 0; i < n; i++) comb[i] = i;
    double total = 0;
    auto count_for = [&](const std::vector<size_t>& piv) {
        double cnt = 1;
        std::vector<bool> isp(dim, false);
        for (size_t r : piv) isp[r] = true;
        for (size_t r = 0; r < dim; r++) {
            if (isp[r]) continue;
            for (size_t kcol = 0; kcol < n; kcol++)
                cnt *= (r < piv[kcol]) ? double(q) / double(p) : double(q);
        }
        return cnt;
    };
    auto next_comb = [&]() {
        size_t i = n;
        while (i > 0) {
            i--;
            if (comb[i] != i + dim - n) {
                comb[i]++;
                for (size_t j = i + 1; j < n; j++) comb[j] = comb[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    do total += count_for(comb); while (next_comb());
    if (total > 1e7) fail(errc::too_large, "enumerate_ogr: too many candidate bases");

    std::vector<IsotropicSummand> out;
    for (size_t i = 0; i < n; i++) comb[i] = i;
    do {
        std::vector<bool> isp(dim, false);
        for (size_t r : comb) isp[r] = true;
        struct FreePos { size_t row, col; uint64_t radix, scale; };
        std::vector<FreePos> free_pos;
        for (size_t r = 0; r < dim; r++) {
            if (isp[r]) continue;
            for (size_t kcol = 0; kcol < n; kcol++) {
                if (r < comb[kcol])
                    free_pos.push_back({r, kcol, q / p, p});
                else
                    free_pos.push_back({r, kcol, q, 1});
            }
        }
        std::vector<uint64_t> digits(free_pos.size(), 0);
        MatModQ B(dim, n);
        for (;;) {
            for (auto& x : B.data()) x = 0;
            for (size_t kcol = 0; kcol < n; kcol++) B.at(comb[kcol], kcol) = 1;
            for (size_t t = 0; t < free_pos.size(); t++)
                B.at(free_pos[t].row, free_pos[t].col) = digits[t] * free_pos[t].scale;

            bool iso = true;
            for (size_t j = 0; j < n && iso; j++) {
                auto cj = column(B, j);
                if (q_eval(cj, sp) != 0) iso = false;
                for (size_t i2 = 0; i2 < j && iso; i2++)
                    if (inner(column(B, i2), cj, sp) != 0) iso = false;
            }
            if (iso) out.push_back(IsotropicSummand::from_basis(B, sp));

            size_t t = 0;
            while (t < digits.size()) {
                if (++digits[t] < free_pos[t].radix) break;
                digits[t] = 0;
                t++;
            }
            if (t == digits.size()) break;
        }
    } while (next_comb());
    return out;
}

int component_sign(const IsotropicSummand& Z, const HyperbolicSpace& sp) {
    IsotropicSummand W = IsotropicSummand::standard_w(sp);
    return int(intersect(Z, W, sp, 1).parts() % 2);
}

} // namespace isoclass
