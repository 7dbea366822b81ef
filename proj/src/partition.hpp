#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace isoclass {

// Isomorphism type of a finite abelian p-group: nonincreasing list of
// positive exponents.  The empty list is the trivial group.
class Partition {
  public:
    Partition() = default;
    explicit Partition(std::vector<uint32_t> exps);

    static Partition parse(const std::string& text); // "2,1,1"; sorts if needed

    const std::vector<uint32_t>& exps() const { return exps_; }
    size_t parts() const { return exps_.size(); }          // = dim G[p]
    uint64_t exp_sum() const;                              // #G = p^exp_sum
    uint32_t largest() const { return exps_.empty() ? 0 : exps_[0]; }
    bool empty() const { return exps_.empty(); }
    bool even_multiplicities() const;

    std::string to_string() const;                          // "" for trivial
    std::string pretty(uint64_t p) const;                   // "Z/9 + Z/3", "0"

    auto operator<=>(const Partition&) const = default;

  private:
    std::vector<uint32_t> exps_;
};

// All partitions of total n (used to enumerate symplectic types of size
// p^{2k} as doubled partitions of k).
std::vector<Partition> partitions_of(uint32_t n);

} // namespace isoclass
