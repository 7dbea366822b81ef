#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mat.hpp"
#include "stats.hpp"
#include "support/oracles.hpp"

using namespace isoclass;

namespace {

MatModQ random_mat(size_t r, size_t c, const PadicCtx& ctx, Rng& rng) {
    MatModQ M(r, c);
    for (auto& x : M.data()) x = rng.below(ctx.q());
    return M;
}

std::vector<uint32_t> snf_exps(const MatModQ& M, const PadicCtx& ctx) {
    return smith_normal_form(M, ctx).exps;
}

} // namespace

TEST_CASE("context guards") {
    CHECK_THROWS_AS(PadicCtx(4, 3), error);
    CHECK_THROWS_AS(PadicCtx(2, 0), error);
    CHECK_THROWS_AS(PadicCtx(2, 64), error); // 2^64 over the residue bound
    PadicCtx ctx(3, 5);
    CHECK(ctx.q() == 243);
    CHECK(ctx.val(0) == 5);
    CHECK(ctx.val(18) == 2);
    CHECK(ctx.mul(ctx.unit_inv(7), 7) == 1);
}

TEST_CASE("snf identity and diagonal") {
    PadicCtx ctx(2, 4);
    CHECK(snf_exps(MatModQ::identity(2), ctx) == std::vector<uint32_t>{0, 0});
    MatModQ D(2, 2);
    D.at(0, 0) = 2;
    D.at(1, 1) = 4;
    CHECK(snf_exps(D, ctx) == std::vector<uint32_t>{1, 2});
}

TEST_CASE("snf factorization U M V = diag") {
    PadicCtx ctx(3, 4);
    Rng rng(11);
    for (int t = 0; t < 50; t++) {
        MatModQ M = random_mat(3, 4, ctx, rng);
        SnfResult s = smith_normal_form(M, ctx);
        MatModQ prod = mat_mul(mat_mul(s.U, M, ctx), s.V, ctx);
        for (size_t i = 0; i < 3; i++)
            for (size_t j = 0; j < 4; j++) {
                uint64_t want = (i == j && s.exps[i] < ctx.E()) ? ctx.pow_p(s.exps[i]) : 0;
                CHECK(prod.at(i, j) == want);
            }
        // Uinv really inverts U
        MatModQ id = mat_mul(s.U, s.Uinv, ctx);
        CHECK(id == MatModQ::identity(3));
        // U and V stay invertible mod p
        CHECK(rank_mod_p(s.U, ctx) == 3);
        CHECK(rank_mod_p(s.V, ctx) == 4);
    }
}

TEST_CASE("snf exponents invariant under unimodular multiplication") {
    for (uint64_t p : {2ull, 3ull, 5ull}) {
        for (uint32_t E : {3u, 6u}) {
            PadicCtx ctx(p, E);
            Rng rng(1000 * p + E);
            for (int t = 0; t < 100; t++) {
                MatModQ M = random_mat(3, 3, ctx, rng);
                auto base = snf_exps(M, ctx);
                MatModQ L = sample_unimodular(3, ctx, rng);
                MatModQ R = sample_unimodular(3, ctx, rng);
                CHECK(snf_exps(mat_mul(mat_mul(L, M, ctx), R, ctx), ctx) == base);
            }
        }
    }
}

TEST_CASE("snf agrees with integer smith form") {
    PadicCtx ctx(2, 8);
    Rng rng(7);
    for (int t = 0; t < 60; t++) {
        // integer product with known structure: M^t D M over Z
        MatModQ D(4, 4);
        D.at(0, 2) = 2;
        D.at(1, 3) = 4;
        D.at(2, 0) = ctx.q() - 2;
        D.at(3, 1) = ctx.q() - 4;
        MatModQ M = sample_unimodular(4, ctx, rng);
        MatModQ A = mat_mul(mat_mul(mat_transpose(M), D, ctx), M, ctx);
        CokernelShape sh = cokernel_shape(A, ctx);
        CHECK(sh.free_rank == 0);
        CHECK(sh.resolved);
        CHECK(sh.tors == Partition({2, 2, 1, 1}));
    }
}

TEST_CASE("cokernel shape basics") {
    PadicCtx ctx(2, 5);
    MatModQ Z(2, 2);
    CokernelShape z = cokernel_shape(Z, ctx);
    CHECK(z.free_rank == 2);
    CHECK(z.tors.empty());

    MatModQ A(2, 2);
    A.at(0, 1) = 2;
    A.at(1, 0) = ctx.q() - 2;
    CokernelShape sh = cokernel_shape(A, ctx);
    CHECK(sh.free_rank == 0);
    CHECK(sh.tors == Partition({1, 1}));
    CHECK(sh.resolved);

    // exponent at the boundary E-1 is flagged unresolved
    MatModQ B(1, 1);
    B.at(0, 0) = ctx.pow_p(4);
    CHECK_FALSE(cokernel_shape(B, ctx).resolved);
}

TEST_CASE("rank mod p and rank-nullity against snf") {
    PadicCtx ctx(3, 4);
    CHECK(rank_mod_p(MatModQ::identity(5), ctx) == 5);
    CHECK(rank_mod_p(MatModQ(4, 4), ctx) == 0);
    Rng rng(21);
    for (int t = 0; t < 100; t++) {
        MatModQ M = random_mat(4, 4, ctx, rng);
        auto exps = snf_exps(M, ctx);
        size_t nonunits = 0;
        for (uint32_t e : exps)
            if (e >= 1) nonunits++;
        CHECK(rank_mod_p(M, ctx) + nonunits == 4);
    }
}

TEST_CASE("det valuation equals exponent sum") {
    PadicCtx ctx(2, 10);
    Rng rng(5);
    for (int t = 0; t < 40; t++) {
        MatModQ M = random_mat(3, 3, ctx, rng);
        auto z = oracle::coker_over_z(oracle::lift(M), 2);
        uint64_t v = 0;
        bool finite = z.free_rank == 0;
        for (uint32_t e : z.exps) v += e;
        uint32_t got = det_valuation(M, ctx);
        if (finite && v < ctx.E())
            CHECK(got == v);
        else
            CHECK(got == ctx.E());
    }
}

TEST_CASE("unimodular sampler is uniform over GL_2(F_2)") {
    PadicCtx ctx(2, 1);
    Rng rng(42);
    // enumerate the invertible 2x2 matrices mod 2 as the oracle
    std::map<std::vector<uint64_t>, size_t> classes;
    for (uint64_t bits = 0; bits < 16; bits++) {
        MatModQ M(2, 2);
        for (size_t t = 0; t < 4; t++) M.data()[t] = (bits >> t) & 1;
        if (rank_mod_p(M, ctx) == 2) classes.emplace(M.data(), classes.size());
    }
    REQUIRE(classes.size() == 6);

    const uint64_t N = 100000;
    std::vector<uint64_t> counts(6, 0);
    for (uint64_t t = 0; t < N; t++)
        counts[classes.at(sample_unimodular(2, ctx, rng).data())]++;
    ChiSquareResult c =
        chi_square_binned(counts, std::vector<double>(6, 1.0 / 6.0), 0, 0.0, N);
    CHECK(c.p_value > 1e-3);
}

TEST_CASE("solve_linear finds solutions exactly when consistent") {
    PadicCtx ctx(2, 6);
    Rng rng(3);
    for (int t = 0; t < 100; t++) {
        MatModQ B = random_mat(4, 3, ctx, rng);
        std::vector<uint64_t> a0 = {rng.below(ctx.q()), rng.below(ctx.q()),
                                    rng.below(ctx.q())};
        std::vector<uint64_t> x = mat_vec(B, a0, ctx);
        std::vector<uint64_t> a;
        REQUIRE(solve_linear(B, x, ctx, a));
        CHECK(mat_vec(B, a, ctx) == x);
    }
    // and reports inconsistency
    MatModQ B(2, 1);
    B.at(0, 0) = 2;
    std::vector<uint64_t> a;
    CHECK_FALSE(solve_linear(B, {1, 0}, ctx, a));
}

TEST_CASE("partition parsing and pretty form") {
    CHECK(Partition::parse("").empty());
    CHECK(Partition::parse("2,1,1") == Partition({2, 1, 1}));
    CHECK(Partition::parse("1,2") == Partition({2, 1}));
    CHECK_THROWS_AS(Partition::parse("2,x"), error);
    CHECK(Partition({2, 1}).pretty(3) == "Z/9 \xe2\x8a\x95 Z/3");
    CHECK(Partition{}.pretty(3) == "0");
    CHECK(Partition({2, 2, 1, 1}).even_multiplicities());
    CHECK_FALSE(Partition({2, 1, 1}).even_multiplicities());
}
