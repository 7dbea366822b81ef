#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rng.hpp"

namespace isoclass {

// Regularized incomplete gamma Q(a, x) and the chi-square survival function.
double gamma_q(double a, double x);
double chi_square_pvalue(double stat, double dof);

// Standard binomial z-score with the theory probability's standard error.
double binom_z(uint64_t count, uint64_t trials, double prob);

struct ChiSquareResult {
    double stat = 0;
    uint64_t dof = 0;
    double p_value = 1;
};

// Counts and expected probabilities, class by class, plus a tail class
// holding everything else.  Classes with expected count < min_expected are
// merged into the tail.  DegenerateBuckets when fewer than 2 buckets remain.
ChiSquareResult chi_square_binned(const std::vector<uint64_t>& counts,
                                  const std::vector<double>& probs,
                                  uint64_t tail_count, double tail_prob,
                                  uint64_t trials, double min_expected = 5.0);

// Total variation distance between two finite distributions given class by
// class, with the leftover mass of each side compared as one extra class.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// Bootstrap standard deviation of the TV distance between a multinomial
// resample of `counts` (+ tail) and the reference probabilities.
double bootstrap_tv_sd(const std::vector<uint64_t>& counts, uint64_t tail_count,
                       const std::vector<double>& ref_probs, double ref_tail,
                       uint64_t trials, uint32_t reps, uint64_t seed);

struct MeanVar {
    uint64_t n = 0;
    double mean = 0;
    double m2 = 0;

    void add(double x) {
        n++;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    void merge(const MeanVar& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        double d = o.mean - mean;
        uint64_t tot = n + o.n;
        m2 += o.m2 + d * d * double(n) * double(o.n) / double(tot);
        mean += d * double(o.n) / double(tot);
        n = tot;
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0; }
    double stderr_mean() const;
};

} // namespace isoclass
