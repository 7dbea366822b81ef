#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace isoclass {

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 1000; i++) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; i++) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) fail(errc::invalid_argument, "gamma_q domain");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, double dof) {
    return gamma_q(dof / 2.0, stat / 2.0);
}

double binom_z(uint64_t count, uint64_t trials, double prob) {
    double se = std::sqrt(prob * (1.0 - prob) / double(trials));
    if (se == 0) return 0;
    return (double(count) / double(trials) - prob) / se;
}

ChiSquareResult chi_square_binned(const std::vector<uint64_t>& counts,
                                  const std::vector<double>& probs,
                                  uint64_t tail_count, double tail_prob,
                                  uint64_t trials, double min_expected) {
    if (counts.size() != probs.size())
        fail(errc::invalid_argument, "chi_square_binned: size mismatch");
    double tail_obs = double(tail_count), tail_exp = tail_prob * double(trials);
    std::vector<std::pair<double, double>> buckets; // (observed, expected)
    for (size_t i = 0; i < counts.size(); i++) {
        double e = probs[i] * double(trials);
        if (e < min_expected) {
            tail_obs += double(counts[i]);
            tail_exp += e;
        } else {
            buckets.push_back({double(counts[i]), e});
        }
    }
    if (tail_exp >= min_expected || tail_obs > 0) buckets.push_back({tail_obs, tail_exp});
    if (buckets.size() < 2)
        fail(errc::degenerate_buckets, "chi_square_binned: fewer than 2 buckets");
    ChiSquareResult r;
    for (auto [o, e] : buckets)
        if (e > 0) r.stat += (o - e) * (o - e) / e;
    r.dof = buckets.size() - 1;
    r.p_value = chi_square_pvalue(r.stat, double(r.dof));
    return r;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) fail(errc::invalid_argument, "tv_distance: size mismatch");
    double sum = 0, pm = 0, qm = 0;
    for (size_t i = 0; i < p.size(); i++) {
        sum += std::fabs(p[i] - q[i]);
        pm += p[i];
        qm += q[i];
    }
    sum += std::fabs((1.0 - pm) - (1.0 - qm));
    return sum / 2.0;
}

double bootstrap_tv_sd(const std::vector<uint64_t>& counts, uint64_t tail_count,
                       const std::vector<double>& ref_probs, double ref_tail,
                       uint64_t trials, uint32_t reps, uint64_t seed) {
    const size_t K = counts.size();
    // Empirical sampler over K classes + tail by cumulative counts.
    std::vector<uint64_t> cum(K + 1, 0);
    for (size_t i = 0; i < K; i++) cum[i] = (i ? cum[i - 1] : 0) + counts[i];
    cum[K] = (K ? cum[K - 1] : 0) + tail_count;
    uint64_t total = cum[K];
    if (total == 0) return 0;

    MeanVar mv;
    std::vector<double> probs(K + 1);
    std::vector<double> refs(K + 1);
    for (size_t i = 0; i < K; i++) refs[i] = ref_probs[i];
    refs[K] = ref_tail;
    for (uint32_t rep = 0; rep < reps; rep++) {
        Rng rng(derive_seed(seed, rep, 0xb001));
        std::vector<uint64_t> re(K + 1, 0);
        for (uint64_t t = 0; t < trials; t++) {
            uint64_t u = rng.below(total);
            size_t idx = size_t(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
            re[std::min(idx, K)]++;
        }
        for (size_t i = 0; i <= K; i++) probs[i] = double(re[i]) / double(trials);
        std::vector<double> emp(probs.begin(), probs.end());
        mv.add(tv_distance(emp, refs));
    }
    return std::sqrt(mv.variance());
}

double MeanVar::stderr_mean() const {
    return n > 1 ? std::sqrt(variance() / double(n)) : 0;
}

} // namespace isoclass
