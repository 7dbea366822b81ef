#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "alt.hpp"
#include "selftest.hpp"
#include "theory.hpp"
#include "support/oracles.hpp"

using namespace isoclass;

TEST_CASE("gl_alt_ratio values and enumeration oracle") {
    CHECK(gl_alt_ratio(0, 2) == BigRat(1));
    CHECK(gl_alt_ratio(2, 2) == BigRat(1, 2));
    CHECK(gl_alt_ratio(4, 2) == BigRat(7, 16));
    CHECK_THROWS_AS(gl_alt_ratio(3, 2), error);

    // enumeration over the 2^6 alternating 4x4 matrices mod 2
    PadicCtx ctx(2, 1);
    uint64_t invertible = 0;
    AltMat A(4);
    for (uint64_t bits = 0; bits < 64; bits++) {
        for (size_t t = 0; t < 6; t++) A.raw()[t] = (bits >> t) & 1;
        if (rank_mod_p(A.to_mat(ctx), ctx) == 4) invertible++;
    }
    CHECK(BigRat(invertible, 64) == gl_alt_ratio(4, 2));
}

TEST_CASE("euler_alt with certified tails") {
    EulerAlt big = euler_alt(0, 997);
    CHECK(std::fabs(big.value - (1.0 - 1.0 / 997.0)) < 1e-6); // dominant factor
    CHECK(std::fabs(big.value - 1.0) < 1.1e-3);
    EulerAlt e0 = euler_alt(0, 2);
    CHECK(e0.value == doctest::Approx(0.41942).epsilon(1e-4));
    EulerAlt e1 = euler_alt(1, 2);
    CHECK(e1.value == doctest::Approx(0.83890).epsilon(1e-4));
    CHECK(e0.tail < 1e-11);
}

TEST_CASE("sp_order: small cases and the full-tuple oracle") {
    SpOrderCache cache;
    CHECK(cache.sp_order({2, Partition{}}) == 1);
    CHECK(cache.sp_order({2, Partition({1, 1})}) == 6);
    CHECK(cache.sp_order({3, Partition({1, 1})}) == 24);
    CHECK(cache.sp_order({2, Partition({2, 2})}) == 48);
    CHECK(cache.sp_order({2, Partition({1, 1, 1, 1})}) == 720);
    CHECK_THROWS_AS(cache.sp_order({2, Partition({1})}), error);

    for (uint64_t p : {2ull, 3ull})
        for (uint32_t k : {1u, 2u})
            for (const SymplecticType& G : symplectic_types_of_size(p, k))
                CHECK(cache.sp_order(G) == sp_order_bruteforce(G));

    // elementary type of rank 2g: order p^{g^2} prod (p^{2i} - 1)
    for (uint32_t g : {3u, 4u}) {
        SymplecticType G{2, Partition(std::vector<uint32_t>(2 * g, 1))};
        BigInt expect = bigint_pow(BigInt(2), g * g);
        for (uint32_t i = 1; i <= g; i++) expect *= bigint_pow(BigInt(2), 2 * i) - 1;
        CHECK(cache.sp_order(G) == expect);
    }
}

TEST_CASE("weights") {
    SpOrderCache cache;
    CHECK(w_weight({2, Partition({1, 1})}, cache) == BigRat(2, 3));
    CHECK(w_sum_exact(2, 1) == BigRat(2, 3));
    CHECK(w_sum_exact(2, 0) == BigRat(1));
    for (auto [p, k] : std::initializer_list<std::pair<uint64_t, uint32_t>>{
             {2, 1}, {2, 2}, {3, 1}}) {
        BigRat sum = 0;
        for (const SymplecticType& G : symplectic_types_of_size(p, k))
            sum += w_weight(G, cache);
        CHECK(sum == w_sum_exact(p, k));
    }
}

TEST_CASE("surjection counts against brute force") {
    SymplecticType g22{2, Partition({1, 1})};
    CHECK(surjection_count(g22, 2) == 6);
    for (uint64_t p : {2ull, 3ull}) {
        for (uint32_t n : {2u, 3u, 4u}) {
            for (const Partition& part :
                 {Partition{}, Partition({1}), Partition({1, 1}), Partition({2, 1})}) {
                if (part.parts() > n) continue;
                BigInt brute = oracle::surjections_bruteforce(part.exps(), p, n);
                CHECK(surjection_count({p, part}, n) == brute);
            }
        }
    }
}

TEST_CASE("finite-size cokernel law: closed values") {
    SpOrderCache cache;
    CHECK(pi_finite({2, Partition{}}, 2, cache) == BigRat(1, 2));
    CHECK(pi_finite({2, Partition{}}, 4, cache) == BigRat(7, 16));
    CHECK(pi_finite({2, Partition({1, 1})}, 2, cache) == BigRat(1, 4));
    CHECK(pi_finite({2, Partition({1, 1})}, 4, cache) == BigRat(35, 128));
    CHECK_THROWS_AS(pi_finite({2, Partition({1, 1})}, 3, cache), error);
}

TEST_CASE("finite-size law equals exhaustive statistics mod p^2") {
    SpOrderCache cache;
    for (uint64_t p : {2ull, 3ull}) {
        PadicCtx ctx(p, 2);
        const size_t n = 4;
        const size_t ups = n * (n - 1) / 2;
        uint64_t total = 1;
        for (size_t i = 0; i < ups; i++) total *= ctx.q();
        uint64_t trivial = 0, onepair = 0;
        AltMat A(n);
        std::vector<uint64_t> digits(ups, 0);
        for (uint64_t it = 0; it < total; it++) {
            for (size_t t = 0; t < ups; t++) A.raw()[t] = digits[t];
            auto exps = smith_normal_form(A.to_mat(ctx), ctx).exps;
            // exponents of the 2-adic matrix are determined exactly below the
            // precision, so these two patterns are certain
            if (exps == std::vector<uint32_t>{0, 0, 0, 0}) trivial++;
            if (exps == std::vector<uint32_t>{0, 0, 1, 1}) onepair++;
            size_t c = 0;
            while (c < ups && ++digits[c] == ctx.q()) digits[c++] = 0;
        }
        CHECK(BigRat(trivial, total) == pi_finite({p, Partition{}}, 4, cache));
        CHECK(BigRat(onepair, total) == pi_finite({p, Partition({1, 1})}, 4, cache));
    }
}

TEST_CASE("finite-size law sums to one with a certified tail") {
    SpOrderCache cache;
    for (uint64_t p : {2ull, 3ull}) {
        for (uint32_t n : {2u, 4u}) {
            BigRat partial = 0;
            uint32_t K = p == 2 ? 6 : 4;
            for (uint32_t k = 0; k <= K; k++)
                for (const SymplecticType& G : symplectic_types_of_size(p, k))
                    if (G.part.parts() <= n) partial += pi_finite(G, n, cache);
            CHECK(partial <= 1);
            // tail mass <= sum_{k>K} 2 p^{-k} = 2 p^{-K} / (p-1)
            BigRat tail = BigRat(2, bigint_pow(BigInt(p), K)) / BigRat(p - 1);
            CHECK(BigRat(1) - partial <= tail);
        }
    }
}

TEST_CASE("limit law values and partial sums") {
    SpOrderCache cache;
    ApproxProb t0 = pi_limit({2, Partition{}}, 0, cache);
    CHECK(t0.value == doctest::Approx(0.41942).epsilon(1e-4));
    ApproxProb t1 = pi_limit({2, Partition{}}, 1, cache);
    CHECK(t1.value == doctest::Approx(0.83890).epsilon(1e-4));

    double mass = 0;
    for (uint32_t k = 0; k <= 6; k++)
        for (const SymplecticType& G : symplectic_types_of_size(2, k))
            mass += pi_limit(G, 0, cache).value;
    CHECK(mass > 0.999 * (1.0 - 2.0 * std::pow(2.0, -6.0)));
    CHECK(mass <= 1.0);
}

TEST_CASE("stratum law and igusa integral") {
    SpOrderCache cache;
    CHECK(stratum_finite({2, Partition{}}, 3, 1, cache) == BigRat(7, 8));
    CHECK(stratum_finite({3, Partition{}}, 3, 1, cache) == BigRat(26, 27));
    CHECK(stratum_finite({2, Partition{}}, 4, 0, cache) ==
          pi_finite({2, Partition{}}, 4, cache));
    CHECK(igusa(2, 0, 2) == BigRat(1));
    CHECK(igusa(2, 1, 2) == BigRat(4, 7));
    CHECK(igusa(4, 1, 3) == BigRat(81, 121));
    CHECK_THROWS_AS(igusa(3, 1, 2), error);
}

TEST_CASE("moments") {
    CHECK(moment_finite(0, 3, 2, 1) == BigRat(1));
    CHECK(moment_finite(1, 1, 2, 1) == BigRat(1, 2));
    CHECK(moment_finite(1, 2, 2, 1) == BigRat(1));
    CHECK(moment_finite(1, 1, 2, 2) == BigRat(1));
    CHECK(moment_limit(1, 2, 2) == 4);
    CHECK(moment_limit(2, 2, 1) == 8);
    double fin = to_double(moment_finite(1, 10, 2, 2));
    CHECK(std::fabs(fin - 4.0) / 4.0 < 0.05);
}

TEST_CASE("injection counts") {
    CHECK(count_injections(Partition{}, 0, 2, 1) == 1);
    CHECK(count_injections(Partition({1}), 1, 2, 1) == 1);
    CHECK(count_injections(Partition({2, 2}), 1, 2, 2) == 12);
    CHECK(count_injections(Partition({1, 1}), 2, 2, 1) == 6);
    for (uint64_t p : {2ull, 3ull})
        for (uint32_t e : {1u, 2u})
            for (uint32_t m : {1u, 2u})
                for (const Partition& g :
                     {Partition({1}), Partition({2, 1}), Partition({2, 2})})
                    CHECK(count_injections(g, m, p, e) ==
                          injection_count_closed(g, m, p, e));
}

TEST_CASE("pairing-match probability and dimension formulas") {
    CHECK(prob_same_pairing({0}, 2, 2) == BigRat(1, 2));
    CHECK(prob_same_pairing({1}, 2, 2) == BigRat(1, 4));
    ApproxProb nz = prob_nonzero_T(1, 2);
    CHECK(nz.value == doctest::Approx(0.16110).epsilon(1e-3));
    CHECK(schubert_dim(5, 0) == 10);
    CHECK(schubert_dim(5, 2) == 9);
    CHECK(stratum_dim(5, 2) == 9);
    CHECK(stratum_dim(4, 0) == 6);
}

TEST_CASE("sp_order cache file round-trip") {
    std::string path = "/tmp/isoclass_test_cache.txt";
    std::remove(path.c_str());
    {
        SpOrderCache cache;
        cache.set_cache_path(path);
        CHECK(cache.sp_order({2, Partition({2, 2, 1, 1})}) == 4608);
    }
    {
        SpOrderCache cache;
        cache.set_cache_path(path);
        // loads the persisted value (and would recompute identically anyway)
        CHECK(cache.sp_order({2, Partition({2, 2, 1, 1})}) == 4608);
        cache.clear();
    }
    std::FILE* f = std::fopen(path.c_str(), "r");
    CHECK(f == nullptr);
    if (f) std::fclose(f);
}

TEST_CASE("selftest suite passes") {
    SpOrderCache cache;
    SelftestResult r = run_selftest(cache);
    CHECK(r.all_pass);
    CHECK(r.report_json.find("\"all_pass\": true") != std::string::npos);
}
