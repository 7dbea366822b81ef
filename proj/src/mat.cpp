#include "mat.hpp"

#include <algorithm>

namespace isoclass {

MatModQ MatModQ::identity(size_t n) {
    MatModQ I(n, n);
    for (size_t i = 0; i < n; i++) I.at(i, i) = 1;
    return I;
}

MatModQ MatModQ::reduced(const PadicCtx& to) const {
    MatModQ R(rows_, cols_);
    for (size_t i = 0; i < a_.size(); i++) R.data()[i] = a_[i] % to.q();
    return R;
}

MatModQ mat_mul(const MatModQ& A, const MatModQ& B, const PadicCtx& ctx) {
    if (A.cols() != B.rows()) fail(errc::internal, "mat_mul shape mismatch");
    MatModQ C(A.rows(), B.cols());
    for (size_t i = 0; i < A.rows(); i++)
        for (size_t k = 0; k < A.cols(); k++) {
            uint64_t a = A.at(i, k);
            if (!a) continue;
            for (size_t j = 0; j < B.cols(); j++)
                C.at(i, j) = ctx.add(C.at(i, j), ctx.mul(a, B.at(k, j)));
        }
    return C;
}

MatModQ mat_transpose(const MatModQ& A) {
    MatModQ T(A.cols(), A.rows());
    for (size_t i = 0; i < A.rows(); i++)
        for (size_t j = 0; j < A.cols(); j++) T.at(j, i) = A.at(i, j);
    return T;
}

std::vector<uint64_t> mat_vec(const MatModQ& A, const std::vector<uint64_t>& x,
                              const PadicCtx& ctx) {
    if (A.cols() != x.size()) fail(errc::internal, "mat_vec shape mismatch");
    std::vector<uint64_t> y(A.rows(), 0);
    for (size_t i = 0; i < A.rows(); i++)
        for (size_t j = 0; j < A.cols(); j++)
            y[i] = ctx.add(y[i], ctx.mul(A.at(i, j), x[j]));
    return y;
}

namespace {

void row_sub(MatModQ& M, size_t dst, size_t src, uint64_t f, const PadicCtx& ctx) {
    for (size_t j = 0; j < M.cols(); j++)
        M.at(dst, j) = ctx.sub(M.at(dst, j), ctx.mul(f, M.at(src, j)));
}

void col_sub(MatModQ& M, size_t dst, size_t src, uint64_t f, const PadicCtx& ctx) {
    for (size_t i = 0; i < M.rows(); i++)
        M.at(i, dst) = ctx.sub(M.at(i, dst), ctx.mul(f, M.at(i, src)));
}

void col_add(MatModQ& M, size_t dst, size_t src, uint64_t f, const PadicCtx& ctx) {
    for (size_t i = 0; i < M.rows(); i++)
        M.at(i, dst) = ctx.add(M.at(i, dst), ctx.mul(f, M.at(i, src)));
}

void swap_rows(MatModQ& M, size_t a, size_t b) {
    if (a == b) return;
    for (size_t j = 0; j < M.cols(); j++) std::swap(M.at(a, j), M.at(b, j));
}

void swap_cols(MatModQ& M, size_t a, size_t b) {
    if (a == b) return;
    for (size_t i = 0; i < M.rows(); i++) std::swap(M.at(i, a), M.at(i, b));
}

} // namespace

SnfResult smith_normal_form(const MatModQ& M, const PadicCtx& ctx) {
    const size_t r = M.rows(), c = M.cols(), d = std::min(r, c);
    SnfResult out;
    out.exps.assign(d, ctx.E());
    out.U = MatModQ::identity(r);
    out.Uinv = MatModQ::identity(r);
    out.V = MatModQ::identity(c);
    MatModQ A = M;

    for (size_t k = 0; k < d; k++) {
        // Pivot of minimal valuation; ties broken by row-major order.
        uint32_t best = ctx.E();
        size_t pi = k, pj = k;
        for (size_t i = k; i < r && best > 0; i++)
            for (size_t j = k; j < c; j++) {
                uint32_t v = ctx.val(A.at(i, j));
                if (v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                    if (best == 0) break;
                }
            }
        if (best >= ctx.E()) break; // remaining block is 0 mod p^E
        swap_rows(A, k, pi);
        swap_rows(out.U, k, pi);
        swap_cols(out.Uinv, k, pi);
        swap_cols(A, k, pj);
        swap_cols(out.V, k, pj);

        const uint64_t pe = ctx.pow_p(best);
        uint64_t unit = A.at(k, k) / pe;
        uint64_t uinv = ctx.unit_inv(unit);
        // Normalize the pivot row so A[k][k] = p^best exactly.
        for (size_t j = 0; j < c; j++) A.at(k, j) = ctx.mul(A.at(k, j), uinv);
        for (size_t j = 0; j < r; j++) out.U.at(k, j) = ctx.mul(out.U.at(k, j), uinv);
        for (size_t i = 0; i < r; i++)
            out.Uinv.at(i, k) = ctx.mul(out.Uinv.at(i, k), unit);

        for (size_t i = k + 1; i < r; i++) {
            uint64_t e = A.at(i, k);
            if (!e) continue;
            uint64_t f = e / pe; // exact: val(e) >= best by pivot minimality
            row_sub(A, i, k, f, ctx);
            row_sub(out.U, i, k, f, ctx);
            col_add(out.Uinv, k, i, f, ctx);
        }
        for (size_t j = k + 1; j < c; j++) {
            uint64_t e = A.at(k, j);
            if (!e) continue;
            uint64_t f = e / pe;
            col_sub(A, j, k, f, ctx);
            col_sub(out.V, j, k, f, ctx);
        }
        out.exps[k] = best;
    }
    return out;
}

CokernelShape cokernel_shape(const MatModQ& A, const PadicCtx& ctx) {
    if (A.rows() != A.cols()) fail(errc::invalid_argument, "cokernel_shape: square input required");
    SnfResult s = smith_normal_form(A, ctx);
    CokernelShape shape;
    std::vector<uint32_t> tors;
    for (uint32_t e : s.exps) {
        if (e >= ctx.E()) {
            shape.free_rank++;
        } else if (e > 0) {
            tors.push_back(e);
            if (e > ctx.E() - 2) shape.resolved = false;
        }
    }
    shape.tors = Partition(std::move(tors));
    return shape;
}

size_t rank_mod_p(const MatModQ& M, const PadicCtx& ctx) {
    const uint64_t p = ctx.p();
    std::vector<uint64_t> a(M.data());
    for (auto& x : a) x %= p;
    const size_t r = M.rows(), c = M.cols();
    PadicCtx fp(p, 1);
    size_t rank = 0;
    for (size_t col = 0; col < c && rank < r; col++) {
        size_t piv = rank;
        while (piv < r && a[piv * c + col] == 0) piv++;
        if (piv == r) continue;
        for (size_t j = 0; j < c; j++) std::swap(a[rank * c + j], a[piv * c + j]);
        uint64_t inv = fp.unit_inv(a[rank * c + col]);
        for (size_t j = 0; j < c; j++) a[rank * c + j] = a[rank * c + j] * inv % p;
        for (size_t i = 0; i < r; i++) {
            if (i == rank) continue;
            uint64_t f = a[i * c + col];
            if (!f) continue;
            for (size_t j = 0; j < c; j++)
                a[i * c + j] = (a[i * c + j] + (p - f) * a[rank * c + j]) % p;
        }
        rank++;
    }
    return rank;
}

MatModQ sample_unimodular(size_t n, const PadicCtx& ctx, Rng& rng) {
    MatModQ M(n, n);
    if (n == 0) return M;
    // Invertibility depends on the digit-0 plane alone, so it is drawn and
    // tested first; higher digit planes follow.  Re-running the same seed at
    // a higher precision then extends this matrix p-adically.
    for (;;) {
        for (auto& x : M.data()) x = rng.below(ctx.p());
        if (rank_mod_p(M, ctx) == n) break;
    }
    uint64_t pd = ctx.p();
    for (uint32_t d = 1; d < ctx.E(); d++) {
        for (auto& x : M.data()) x += pd * rng.below(ctx.p());
        pd *= ctx.p();
    }
    return M;
}

uint32_t det_valuation(const MatModQ& M, const PadicCtx& ctx) {
    SnfResult s = smith_normal_form(M, ctx);
    uint64_t v = 0;
    for (uint32_t e : s.exps) {
        v += e;
        if (v >= ctx.E()) return ctx.E();
    }
    return uint32_t(v);
}

Partition column_span_structure(const MatModQ& G, const PadicCtx& ctx_k) {
    if (G.cols() == 0) return Partition{};
    SnfResult s = smith_normal_form(G, ctx_k);
    std::vector<uint32_t> exps;
    for (uint32_t f : s.exps)
        if (f < ctx_k.E()) exps.push_back(ctx_k.E() - f); // p^f Z / p^k Z has order p^{k-f}
    return Partition(std::move(exps));
}

bool solve_linear(const MatModQ& B, const std::vector<uint64_t>& x,
                  const PadicCtx& ctx, std::vector<uint64_t>& a_out) {
    if (B.rows() != x.size()) fail(errc::internal, "solve_linear shape mismatch");
    SnfResult s = smith_normal_form(B, ctx);
    std::vector<uint64_t> c = mat_vec(s.U, x, ctx);
    const size_t d = std::min(B.rows(), B.cols());
    std::vector<uint64_t> t(B.cols(), 0);
    for (size_t i = 0; i < B.rows(); i++) {
        uint32_t e = i < d ? s.exps[i] : ctx.E();
        if (e >= ctx.E()) {
            if (c[i] != 0) return false;
            continue;
        }
        uint64_t pe = ctx.pow_p(e);
        if (c[i] % pe != 0) return false;
        t[i] = c[i] / pe;
    }
    a_out = mat_vec(s.V, t, ctx);
    return true;
}

} // namespace isoclass
