#pragma once

#include <cstdint>
#include <vector>

#include "padic.hpp"
#include "partition.hpp"
#include "rng.hpp"

namespace isoclass {

// Dense matrix over Z/p^E, row-major.
class MatModQ {
  public:
    MatModQ() : rows_(0), cols_(0) {}
    MatModQ(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    static MatModQ identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    uint64_t& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    uint64_t at(size_t i, size_t j) const { return a_[i * cols_ + j]; }
    const std::vector<uint64_t>& data() const { return a_; }
    std::vector<uint64_t>& data() { return a_; }

    bool operator==(const MatModQ&) const = default;

    MatModQ reduced(const PadicCtx& to) const; // entries mod p^{to.E}

  private:
    size_t rows_, cols_;
    std::vector<uint64_t> a_;
};

MatModQ mat_mul(const MatModQ& A, const MatModQ& B, const PadicCtx& ctx);
MatModQ mat_transpose(const MatModQ& A);
std::vector<uint64_t> mat_vec(const MatModQ& A, const std::vector<uint64_t>& x,
                              const PadicCtx& ctx);

// Smith normal form over Z/p^E.  U*M*V = diag(p^exps[i]) with U, V invertible
// mod p^E.  An exponent stored as E is the ">= E" sentinel (entry 0 mod p^E).
// Pivoting: minimal valuation, ties by smallest row-major index, so the output
// is deterministic.
struct SnfResult {
    std::vector<uint32_t> exps; // nondecreasing, length min(rows, cols)
    MatModQ U;                  // rows x rows
    MatModQ V;                  // cols x cols
    MatModQ Uinv;               // inverse of U, maintained alongside
};

SnfResult smith_normal_form(const MatModQ& M, const PadicCtx& ctx);

// Torsion/free split of coker(A) for square A, read off the SNF exponents.
// "resolved" follows the boundary rule: every finite nonzero exponent <= E-2;
// exponents equal to E-1 could be promoted by a uniform lift, so they make the
// split uncertified.
struct CokernelShape {
    uint32_t free_rank = 0;
    Partition tors;
    bool resolved = true;
};

CokernelShape cokernel_shape(const MatModQ& A, const PadicCtx& ctx);

size_t rank_mod_p(const MatModQ& M, const PadicCtx& ctx);

// Uniform over matrices mod p^E invertible mod p (rejection; acceptance
// probability > 0.288 for all n, p).
MatModQ sample_unimodular(size_t n, const PadicCtx& ctx, Rng& rng);

// Valuation of det(M) for square M, via the SNF exponent sum; >= E reports E.
uint32_t det_valuation(const MatModQ& M, const PadicCtx& ctx);

// Structure of the subgroup of (Z/p^k)^rows generated by the columns of G:
// exponents of its cyclic factors, largest first.
Partition column_span_structure(const MatModQ& G, const PadicCtx& ctx_k);

// One solution a of  B a = x (mod p^E), if any.
bool solve_linear(const MatModQ& B, const std::vector<uint64_t>& x,
                  const PadicCtx& ctx, std::vector<uint64_t>& a_out);

} // namespace isoclass
