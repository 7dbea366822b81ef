#pragma once

// Test-only oracles, deliberately independent of the library's modular
// elimination path: plain integer Smith normal form over Z with exact
// arithmetic, brute-force surjection counting, and small helpers.

#include <algorithm>
#include <vector>

#include "exact.hpp"
#include "mat.hpp"
#include "partition.hpp"

namespace oracle {

using isoclass::BigInt;

using ZMat = std::vector<std::vector<BigInt>>;

inline ZMat zmat(size_t r, size_t c) { return ZMat(r, std::vector<BigInt>(c, 0)); }

// Integer lift of a residue matrix with symmetric representatives for the
// alternating structure: entries taken in [0, q).
inline ZMat lift(const isoclass::MatModQ& M) {
    ZMat A = zmat(M.rows(), M.cols());
    for (size_t i = 0; i < M.rows(); i++)
        for (size_t j = 0; j < M.cols(); j++) A[i][j] = M.at(i, j);
    return A;
}

inline ZMat zmul(const ZMat& A, const ZMat& B) {
    ZMat C = zmat(A.size(), B[0].size());
    for (size_t i = 0; i < A.size(); i++)
        for (size_t k = 0; k < B.size(); k++)
            for (size_t j = 0; j < B[0].size(); j++) C[i][j] += A[i][k] * B[k][j];
    return C;
}

// Elementary divisors over Z (nonnegative, zeros for free rank), classic
// Smith reduction with exact integers.
inline std::vector<BigInt> smith_over_z(ZMat A) {
    size_t r = A.size(), c = r ? A[0].size() : 0;
    std::vector<BigInt> divs;
    size_t k = 0;
    while (k < r && k < c) {
        // find a nonzero entry of minimal absolute value
        size_t pi = k, pj = k;
        BigInt best = 0;
        for (size_t i = k; i < r; i++)
            for (size_t j = k; j < c; j++) {
                BigInt v = abs(A[i][j]);
                if (v != 0 && (best == 0 || v < best)) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break;
        std::swap(A[k], A[pi]);
        for (size_t i = k; i < r; i++) std::swap(A[i][k], A[i][pj]);
        bool clean = true;
        for (size_t i = k + 1; i < r; i++) {
            BigInt f = A[i][k] / A[k][k];
            if (f != 0)
                for (size_t j = k; j < c; j++) A[i][j] -= f * A[k][j];
            if (A[i][k] != 0) clean = false;
        }
        for (size_t j = k + 1; j < c; j++) {
            BigInt f = A[k][j] / A[k][k];
            if (f != 0)
                for (size_t i = k; i < r; i++) A[i][j] -= f * A[i][k];
            if (A[k][j] != 0) clean = false;
        }
        if (!clean) continue; // remainder left; repeat with a smaller pivot
        divs.push_back(abs(A[k][k]));
        k++;
    }
    while (divs.size() < std::min(r, c)) divs.push_back(0);
    // enforce the divisibility chain via gcd/lcm sweeps
    for (size_t i = 0; i < divs.size(); i++)
        for (size_t j = i + 1; j < divs.size(); j++) {
            if (divs[i] == 0) std::swap(divs[i], divs[j]);
            if (divs[i] == 0 || divs[j] == 0) continue;
            BigInt g = gcd(divs[i], divs[j]);
            BigInt l = divs[i] / g * divs[j];
            divs[i] = g;
            divs[j] = l;
        }
    std::sort(divs.begin(), divs.end(), [](const BigInt& a, const BigInt& b) {
        if (a == 0) return false;
        if (b == 0) return true;
        return a < b;
    });
    return divs;
}

// p-exponents of the torsion part and the free rank, from integer divisors.
struct ZCoker {
    std::vector<uint32_t> exps; // nonincreasing
    uint32_t free_rank = 0;
};

inline ZCoker coker_over_z(const ZMat& A, uint64_t p) {
    ZCoker out;
    for (const BigInt& d : smith_over_z(A)) {
        if (d == 0) {
            out.free_rank++;
            continue;
        }
        BigInt v = d;
        uint32_t e = 0;
        while (v % p == 0) {
            v /= p;
            e++;
        }
        if (e) out.exps.push_back(e);
    }
    std::sort(out.exps.begin(), out.exps.end(), std::greater<>());
    return out;
}

// Brute-force count of surjections (Z/p^top)^n -> G for G = prod Z/p^{lam_c}:
// enumerate all matrices of images and test that the induced map on G/pG is
// onto (Nakayama).
inline BigInt surjections_bruteforce(const std::vector<uint32_t>& lam, uint64_t p,
                                     uint32_t n) {
    const size_t L = lam.size();
    std::vector<uint64_t> mod(L);
    uint64_t card = 1;
    for (size_t c = 0; c < L; c++) {
        uint64_t m = 1;
        for (uint32_t t = 0; t < lam[c]; t++) m *= p;
        mod[c] = m;
        card *= m;
    }
    if (L == 0) return 1;
    double bits = double(n) * std::log2(double(card));
    if (bits > 24) throw std::runtime_error("surjections_bruteforce: too large");

    std::vector<uint64_t> digits(n * L, 0);
    BigInt count = 0;
    isoclass::PadicCtx fp(p, 1);
    for (;;) {
        // images mod p as an L x n matrix; surjective iff full rank L
        std::vector<std::vector<uint64_t>> m(L, std::vector<uint64_t>(n));
        for (size_t j = 0; j < n; j++)
            for (size_t c = 0; c < L; c++) m[c][j] = digits[j * L + c] % p;
        size_t rank = 0;
        for (size_t col = 0; col < n && rank < L; col++) {
            size_t piv = rank;
            while (piv < L && m[piv][col] == 0) piv++;
            if (piv == L) continue;
            std::swap(m[piv], m[rank]);
            uint64_t inv = fp.unit_inv(m[rank][col]);
            for (size_t j = 0; j < n; j++) m[rank][j] = m[rank][j] * inv % p;
            for (size_t i = 0; i < L; i++) {
                if (i == rank) continue;
                uint64_t f = m[i][col];
                if (!f) continue;
                for (size_t j = 0; j < n; j++)
                    m[i][j] = (m[i][j] + (p - f) * m[rank][j]) % p;
            }
            rank++;
        }
        if (rank == L) count++;
        size_t t = 0;
        while (t < digits.size()) {
            if (++digits[t] < mod[t % L]) break;
            digits[t] = 0;
            t++;
        }
        if (t == digits.size()) break;
    }
    return count;
}

} // namespace oracle
