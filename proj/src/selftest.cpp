#include "selftest.hpp"

#include <json.hpp>

#include "quad.hpp"

namespace isoclass {

using njson = nlohmann::json;

namespace {

struct Checker {
    njson checks = njson::array();
    bool all = true;

    void add(const std::string& name, bool pass, const std::string& detail) {
        njson c;
        c["name"] = name;
        c["pass"] = pass;
        c["detail"] = detail;
        checks.push_back(c);
        all &= pass;
    }
};

std::string rat_str(const BigRat& r) {
    return BigRat(r).str();
}

// Exhaustive average of I_m over all ordered pairs of maximal isotropic
// summands of (Z/q)^{2n}.
BigRat exhaustive_moment(uint32_t m, uint32_t n, uint64_t p, uint32_t e) {
    auto all = enumerate_ogr(n, p, e);
    PadicCtx ctx(p, e);
    HyperbolicSpace sp(n, ctx);
    BigInt total = 0;
    for (const auto& Z : all)
        for (const auto& W : all) {
            Partition G = intersect(Z, W, sp, e);
            total += count_injections(G, m, p, e);
        }
    return BigRat(total, BigInt(all.size()) * BigInt(all.size()));
}

} // namespace

SelftestResult run_selftest(SpOrderCache& cache) {
    Checker ck;

    // 1. Summand counts against q^{n(n-1)/2} prod (1 + p^{i-n}).
    struct { uint32_t n; uint64_t p; uint32_t e; } ogr_cases[] = {
        {1, 2, 1}, {1, 3, 1}, {1, 2, 2}, {2, 2, 1}, {2, 3, 1}, {2, 2, 2}, {3, 2, 1},
    };
    for (auto [n, p, e] : ogr_cases) {
        BigInt expect = ogr_count(n, p, e);
        size_t got = enumerate_ogr(n, p, e).size();
        uint64_t q = 1;
        for (uint32_t t = 0; t < e; t++) q *= p;
        ck.add("ogr_count n=" + std::to_string(n) + " q=" + std::to_string(q),
               BigInt(got) == expect,
               "enumerated " + std::to_string(got) + ", formula " + expect.str());
    }

    // 2. Exhaustive moment averages equal the finite-size closed form.
    struct { uint32_t m, n; uint64_t p; uint32_t e; } mom_cases[] = {
        {1, 1, 2, 1}, {1, 2, 2, 1}, {1, 1, 2, 2},
    };
    for (auto [m, n, p, e] : mom_cases) {
        BigRat got = exhaustive_moment(m, n, p, e);
        BigRat expect = moment_finite(m, n, p, e);
        uint64_t q = 1;
        for (uint32_t t = 0; t < e; t++) q *= p;
        ck.add("moment m=" + std::to_string(m) + " n=" + std::to_string(n) +
                   " q=" + std::to_string(q),
               got == expect, "exhaustive " + rat_str(got) + ", formula " + rat_str(expect));
    }

    // 3. Weight sums: sum over #G = p^{2k} of #G/#Sp(G) equals
    //    p^{-k} prod (1 - p^{-2j})^{-1}.
    struct { uint64_t p; uint32_t k; } w_cases[] = {
        {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {5, 1},
    };
    for (auto [p, k] : w_cases) {
        BigRat sum = 0;
        for (const SymplecticType& G : symplectic_types_of_size(p, k))
            sum += w_weight(G, cache);
        BigRat expect = w_sum_exact(p, k);
        ck.add("w_sum p=" + std::to_string(p) + " k=" + std::to_string(k),
               sum == expect, "sum " + rat_str(sum) + ", closed form " + rat_str(expect));
    }

    // 4. 1/N <= sum_{#G=N^2} w_G <= 2/N for N <= 64, multiplicative over the
    //    prime factorization of N.
    {
        bool ok = true;
        std::string detail;
        std::map<std::pair<uint64_t, uint32_t>, BigRat> prime_sums;
        for (uint64_t N = 1; N <= 64 && ok; N++) {
            BigRat total = 1;
            uint64_t rem = N;
            for (uint64_t p = 2; p <= rem; p++) {
                if (rem % p != 0) continue;
                uint32_t k = 0;
                while (rem % p == 0) {
                    rem /= p;
                    k++;
                }
                auto key = std::make_pair(p, k);
                if (!prime_sums.count(key)) {
                    BigRat s = 0;
                    for (const SymplecticType& G : symplectic_types_of_size(p, k))
                        s += w_weight(G, cache);
                    prime_sums[key] = s;
                }
                total *= prime_sums[key];
            }
            if (total < BigRat(1, N) || total > BigRat(2, N)) {
                ok = false;
                detail = "violated at N=" + std::to_string(N) + ": " + rat_str(total);
            }
        }
        ck.add("w_bounds N<=64", ok, ok ? "all within [1/N, 2/N]" : detail);
    }

    // 5. Invertible fraction among alternating matrices mod p, by enumeration.
    {
        PadicCtx ctx(2, 1);
        uint64_t invertible = 0, total = 0;
        AltMat A(4);
        for (uint64_t bits = 0; bits < 64; bits++) {
            size_t t = 0;
            for (size_t i = 0; i < 4; i++)
                for (size_t j = i + 1; j < 4; j++) A.upper(i, j) = (bits >> t++) & 1;
            total++;
            if (rank_mod_p(A.to_mat(ctx), ctx) == 4) invertible++;
        }
        BigRat got(invertible, total);
        ck.add("gl_alt_ratio m=4 p=2", got == gl_alt_ratio(4, 2),
               "enumerated " + rat_str(got) + ", formula " + rat_str(gl_alt_ratio(4, 2)));
    }

    // 6. Rank-2 determinant integral against its geometric series
    //    sum_k (1 - 1/p) p^{-k} p^{-2sk}.
    {
        bool ok = true;
        std::string detail = "p=2,3 s=1,2";
        for (uint64_t p : {2ull, 3ull})
            for (uint32_t s : {1u, 2u}) {
                BigRat series = 0;
                // closed geometric sum: (1 - 1/p) / (1 - p^{-(2s+1)})
                BigInt den = bigint_pow(BigInt(p), 2 * s + 1);
                series = BigRat(p - 1, p) / (BigRat(1) - BigRat(1, den));
                if (series != igusa(2, s, p)) {
                    ok = false;
                    detail = "mismatch at p=" + std::to_string(p) + " s=" + std::to_string(s);
                }
            }
        ck.add("igusa n=2 series", ok, detail);
    }

    // 7. Injection counts: closed route equals enumeration on a small grid.
    {
        bool ok = true;
        std::string detail = "grids p=2,3";
        for (uint64_t p : {2ull, 3ull})
            for (uint32_t e : {1u, 2u})
                for (uint32_t m : {1u, 2u}) {
                    std::vector<Partition> gs = {Partition{}, Partition({1}), Partition({1, 1}),
                                                 Partition({2}), Partition({2, 1}),
                                                 Partition({2, 2})};
                    for (const Partition& g : gs) {
                        if (count_injections(g, m, p, e) !=
                            injection_count_closed(g, m, p, e)) {
                            ok = false;
                            detail = "mismatch G=" + g.to_string() + " m=" +
                                     std::to_string(m) + " p=" + std::to_string(p) +
                                     " e=" + std::to_string(e);
                        }
                    }
                }
        ck.add("injection_count closed=enumerated", ok, detail);
    }

    njson j;
    j["schema_version"] = 1;
    j["suite"] = "selftest";
    j["checks"] = ck.checks;
    j["all_pass"] = ck.all;
    SelftestResult out;
    out.all_pass = ck.all;
    out.report_json = j.dump(2) + "\n";
    return out;
}

} // namespace isoclass
