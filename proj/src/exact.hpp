#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace isoclass {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt bigint_pow(BigInt base, uint64_t e) {
    BigInt r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline BigRat bigrat_pow(const BigRat& base, int64_t e) {
    if (e >= 0) {
        BigRat r = 1;
        for (int64_t i = 0; i < e; i++) r *= base;
        return r;
    }
    BigRat r = 1;
    for (int64_t i = 0; i < -e; i++) r /= base;
    return r;
}

inline uint64_t val_p_big(BigInt x, uint64_t p) {
    if (x == 0) fail(errc::internal, "valuation of 0");
    if (x < 0) x = -x;
    uint64_t v = 0;
    while (x % p == 0) {
        x /= p;
        v++;
    }
    return v;
}

// Small dense rational matrix; only what the exact pairing predicates need.
class MatQ {
  public:
    MatQ(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static MatQ identity(size_t n) {
        MatQ I(n, n);
        for (size_t i = 0; i < n; i++) I.at(i, i) = 1;
        return I;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    BigRat& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const BigRat& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    MatQ mul(const MatQ& o) const {
        MatQ C(rows_, o.cols_);
        for (size_t i = 0; i < rows_; i++)
            for (size_t k = 0; k < cols_; k++) {
                if (at(i, k) == 0) continue;
                for (size_t j = 0; j < o.cols_; j++)
                    C.at(i, j) += at(i, k) * o.at(k, j);
            }
        return C;
    }

    MatQ sub(const MatQ& o) const {
        MatQ C(rows_, cols_);
        for (size_t i = 0; i < a_.size(); i++) C.a_[i] = a_[i] - o.a_[i];
        return C;
    }

    // Gauss-Jordan inverse; returns false when singular over Q.
    bool invert(MatQ& out) const {
        if (rows_ != cols_) fail(errc::internal, "invert: non-square");
        size_t n = rows_;
        MatQ A = *this;
        out = identity(n);
        for (size_t col = 0; col < n; col++) {
            size_t piv = col;
            while (piv < n && A.at(piv, col) == 0) piv++;
            if (piv == n) return false;
            if (piv != col)
                for (size_t j = 0; j < n; j++) {
                    std::swap(A.at(col, j), A.at(piv, j));
                    std::swap(out.at(col, j), out.at(piv, j));
                }
            BigRat inv = BigRat(1) / A.at(col, col);
            for (size_t j = 0; j < n; j++) {
                A.at(col, j) *= inv;
                out.at(col, j) *= inv;
            }
            for (size_t i = 0; i < n; i++) {
                if (i == col || A.at(i, col) == 0) continue;
                BigRat f = A.at(i, col);
                for (size_t j = 0; j < n; j++) {
                    A.at(i, j) -= f * A.at(col, j);
                    out.at(i, j) -= f * out.at(col, j);
                }
            }
        }
        return true;
    }

    // Every entry lies in Z_p (denominator prime to p)?
    bool p_integral(uint64_t p) const {
        for (const BigRat& x : a_) {
            BigInt den = boost::multiprecision::denominator(x);
            if (den % p == 0) return false;
        }
        return true;
    }

    BigRat det() const {
        if (rows_ != cols_) fail(errc::internal, "det: non-square");
        size_t n = rows_;
        MatQ A = *this;
        BigRat d = 1;
        for (size_t col = 0; col < n; col++) {
            size_t piv = col;
            while (piv < n && A.at(piv, col) == 0) piv++;
            if (piv == n) return 0;
            if (piv != col) {
                for (size_t j = 0; j < n; j++) std::swap(A.at(col, j), A.at(piv, j));
                d = -d;
            }
            d *= A.at(col, col);
            BigRat inv = BigRat(1) / A.at(col, col);
            for (size_t i = col + 1; i < n; i++) {
                if (A.at(i, col) == 0) continue;
                BigRat f = A.at(i, col) * inv;
                for (size_t j = col; j < n; j++) A.at(i, j) -= f * A.at(col, j);
            }
        }
        return d;
    }

  private:
    size_t rows_, cols_;
    std::vector<BigRat> a_;
};

} // namespace isoclass
