#pragma once

#include <cstdint>

namespace isoclass {

// SplitMix64 step: the stream is fully determined by the 64-bit state, with no
// platform-dependent behavior, which is what makes bit-identical reports
// across thread counts and runs possible.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_u64(uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

// Counter-based derivation: the seed of trial i (attempt a) is a pure function
// of (master, i, a), so parallel scheduling cannot reorder any stream.
inline uint64_t derive_seed(uint64_t master, uint64_t trial, uint64_t attempt = 0) {
    uint64_t h = mix_u64(master ^ 0x2545f4914f6cdd1dULL);
    h = mix_u64(h ^ (trial + 0x9e3779b97f4a7c15ULL));
    h = mix_u64(h ^ (attempt + 0x165667b19e3779f9ULL));
    return h;
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, m). Rejection from the top bits keeps the result unbiased.
    uint64_t below(uint64_t m) {
        if (m <= 1) return 0;
        uint64_t mask = ~uint64_t(0) >> __builtin_clzll((m - 1) | 1);
        for (;;) {
            uint64_t v = next() & mask;
            if (v < m) return v;
        }
    }

    // Uniform double in [0,1) with 53 random bits.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  private:
    uint64_t state_;
};

} // namespace isoclass
