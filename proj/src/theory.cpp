#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "padic.hpp"

#include "errors.hpp"

namespace isoclass {

double to_double(const BigRat& r) { return r.convert_to<double>(); }

BigRat gl_alt_ratio(uint32_t m, uint64_t p) {
    if (m % 2 != 0) fail(errc::invalid_argument, "gl_alt_ratio: m must be even");
    BigRat out = 1;
    for (uint32_t i = 1; i <= m / 2; i++) {
        BigInt d = bigint_pow(BigInt(p), 2 * i - 1);
        out *= BigRat(d - 1, d);
    }
    return out;
}

EulerAlt euler_alt(uint32_t r, uint64_t p, double tol) {
    double value = 1.0;
    double pp = double(p);
    double term = std::pow(pp, -double(2 * r + 1)); // p^{1-2(r+1)}
    double inv_p2 = 1.0 / (pp * pp);
    for (int i = 0; i < 20000; i++) {
        double tail = term / (1.0 - inv_p2);
        if (tail < tol || term == 0.0) return {value, tail};
        value *= (1.0 - term);
        term *= inv_p2;
    }
    return {value, term / (1.0 - inv_p2)};
}

// ---------------------------------------------------------------- sp_order

namespace {

// Mixed-radix element of G = prod Z/p^{lam_c}; pairing against the standard
// symplectic basis with value numerators scaled to denominator p^{lam_0}.
struct SpScan {
    uint64_t p;
    std::vector<uint32_t> lam;   // nonincreasing, even multiplicities
    std::vector<uint64_t> mod;   // p^{lam_c}
    uint32_t amax;
    uint64_t pamax;

    uint64_t pairing_num(const std::vector<uint64_t>& x,
                         const std::vector<uint64_t>& y) const {
        // sum_i (x_{2i} y_{2i+1} - x_{2i+1} y_{2i}) p^{amax - a_i} mod p^{amax}
        __uint128_t acc = 0;
        for (size_t i = 0; 2 * i < lam.size(); i++) {
            uint32_t a = lam[2 * i];
            uint64_t scale = 1;
            for (uint32_t t = 0; t < amax - a; t++) scale *= p;
            uint64_t pa = mod[2 * i];
            uint64_t pos = (__uint128_t)(x[2 * i] % pa) * (y[2 * i + 1] % pa) % pa;
            uint64_t neg = (__uint128_t)(x[2 * i + 1] % pa) * (y[2 * i] % pa) % pa;
            uint64_t diff = (pos + pa - neg) % pa;
            acc += (__uint128_t)diff * scale % pamax;
        }
        return uint64_t(acc % pamax);
    }
};

} // namespace

BigInt SpOrderCache::compute(const SymplecticType& G) const {
    const auto& lam = G.part.exps();
    if (!G.part.even_multiplicities())
        fail(errc::invalid_argument, "sp_order: exponents must have even multiplicities");
    if (G.part.exp_sum() > 0) {
        double bits = double(G.part.exp_sum()) * std::log2(double(G.p));
        if (bits > 20.0) fail(errc::too_large, "sp_order: #G exceeds the 2^20 guard");
    }
    if (lam.empty()) return 1;

    SpScan sc;
    sc.p = G.p;
    sc.lam = lam;
    sc.amax = lam[0];
    sc.pamax = 1;
    for (uint32_t t = 0; t < sc.amax; t++) sc.pamax *= G.p;
    for (uint32_t l : lam) {
        uint64_t m = 1;
        for (uint32_t t = 0; t < l; t++) m *= G.p;
        sc.mod.push_back(m);
    }
    const size_t L = lam.size();

    // Scan generator images level by level.  At an even level (first member
    // of a pair) the image must have exact order p^a; at the following level
    // the pairing with its partner must be -p^{-a}; images must pair to 0
    // with all earlier generators.  The number of valid images depends only
    // on the type of the orthogonal complement of the pairs fixed so far, so
    // multiplying the per-level counts along one chain of choices gives the
    // group order.
    std::vector<std::vector<uint64_t>> fixed;
    BigInt total = 1;
    for (size_t j = 0; j < L; j++) {
        const uint32_t a = lam[j];
        std::vector<uint64_t> targets(j, 0);
        if (j % 2 == 1) {
            // [image, partner] = -p^{-a}, numerator scaled by p^{amax-a}
            uint64_t scale = 1;
            for (uint32_t t = 0; t < sc.amax - a; t++) scale *= G.p;
            targets[j - 1] = (sc.pamax - scale) % sc.pamax;
        }

        // Enumerate G[p^a]: component c ranges over p^{min(lam_c, a)} values
        // scaled by p^{lam_c - min(lam_c, a)}.
        std::vector<uint64_t> radix(L), scale_c(L);
        uint64_t card = 1;
        for (size_t c = 0; c < L; c++) {
            uint32_t mc = std::min(lam[c], a);
            uint64_t r = 1;
            for (uint32_t t = 0; t < mc; t++) r *= G.p;
            radix[c] = r;
            scale_c[c] = sc.mod[c] / r;
            card *= r;
        }

        uint64_t count = 0;
        std::vector<uint64_t> digits(L, 0), x(L, 0);
        std::vector<uint64_t> first;
        for (uint64_t it = 0; it < card; it++) {
            for (size_t c = 0; c < L; c++) x[c] = digits[c] * scale_c[c];
            bool ok = true;
            if (j % 2 == 0) {
                // exact order p^a: x_c != 0 mod p^{lam_c - a + 1} for some
                // component with lam_c >= a, i.e. a unit digit there
                bool survives = false;
                for (size_t c = 0; c < L && !survives; c++) {
                    if (lam[c] < a) continue;
                    survives = digits[c] % G.p != 0;
                }
                ok = survives;
            }
            for (size_t i = 0; i < fixed.size() && ok; i++)
                ok = sc.pairing_num(x, fixed[i]) == targets[i];
            if (ok) {
                count++;
                if (first.empty()) first = x;
            }
            size_t c = 0;
            while (c < L && ++digits[c] == radix[c]) digits[c++] = 0;
        }
        if (count == 0) fail(errc::internal, "sp_order: no valid generator image");
        total *= count;
        fixed.push_back(first);
    }
    return total;
}

namespace {
std::string sp_key(const SymplecticType& G) {
    return std::to_string(G.p) + ":" + G.part.to_string();
}
} // namespace

void SpOrderCache::load_locked() {
    loaded_ = true;
    if (path_.empty()) return;
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        memo_[line.substr(0, eq)] = BigInt(line.substr(eq + 1));
    }
}

void SpOrderCache::append_locked(const std::string& key, const BigInt& value) {
    if (path_.empty()) return;
    bool fresh = false;
    {
        std::ifstream probe(path_);
        fresh = !probe.good();
    }
    std::ofstream out(path_, std::ios::app);
    if (!out) return;
    if (fresh) out << "# isoclass sp_order cache v1\n";
    out << key << "=" << value.str() << "\n";
}

BigInt SpOrderCache::sp_order(const SymplecticType& G) {
    std::string key = sp_key(G);
    {
        std::shared_lock lk(mu_);
        if (loaded_) {
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
    }
    std::unique_lock lk(mu_);
    if (!loaded_) load_locked();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    BigInt value = compute(G);
    memo_[key] = value;
    append_locked(key, value);
    return value;
}

void SpOrderCache::set_cache_path(std::string path) {
    std::unique_lock lk(mu_);
    path_ = std::move(path);
    memo_.clear();
    loaded_ = false;
}

void SpOrderCache::clear() {
    std::unique_lock lk(mu_);
    memo_.clear();
    loaded_ = false;
    if (!path_.empty()) std::remove(path_.c_str());
}

BigInt sp_order_bruteforce(const SymplecticType& G) {
    const auto& lam = G.part.exps();
    if (lam.empty()) return 1;
    const size_t L = lam.size();
    double tuple_bits =
        double(L) * double(G.part.exp_sum()) * std::log2(double(G.p));
    if (tuple_bits > 26) fail(errc::too_large, "sp_order_bruteforce: too many tuples");
    SpScan sc;
    sc.p = G.p;
    sc.lam = lam;
    sc.amax = lam[0];
    sc.pamax = 1;
    for (uint32_t t = 0; t < sc.amax; t++) sc.pamax *= G.p;
    for (uint32_t l : lam) {
        uint64_t m = 1;
        for (uint32_t t = 0; t < l; t++) m *= G.p;
        sc.mod.push_back(m);
    }

    // Standard pairing numerators between generators.
    auto std_num = [&](size_t i, size_t j) -> uint64_t {
        if (i / 2 != j / 2 || i == j) return 0;
        uint64_t scale = 1;
        for (uint32_t t = 0; t < sc.amax - lam[i]; t++) scale *= G.p;
        return i < j ? scale : (sc.pamax - scale) % sc.pamax;
    };

    // All L-tuples of elements; count tuples that kill the generator orders
    // and reproduce every pairing value.  Such a tuple is automatically an
    // automorphism: pairing preservation forces injectivity.
    std::vector<std::vector<uint64_t>> imgs(L, std::vector<uint64_t>(L, 0));
    std::vector<uint64_t> flat(L * L, 0);
    BigInt count = 0;
    for (;;) {
        for (size_t j = 0; j < L; j++)
            for (size_t c = 0; c < L; c++) imgs[j][c] = flat[j * L + c];
        bool ok = true;
        for (size_t j = 0; j < L && ok; j++) {
            // p^{lam_j} kills the image
            for (size_t c = 0; c < L && ok; c++) {
                uint64_t v = imgs[j][c];
                uint64_t killer = 1;
                for (uint32_t t = 0; t < lam[j]; t++) killer *= G.p;
                ok = ((__uint128_t)v * killer % sc.mod[c]) == 0;
            }
            for (size_t i = 0; i < j && ok; i++)
                ok = sc.pairing_num(imgs[j], imgs[i]) == std_num(j, i);
        }
        if (ok) count++;
        // increment the flat mixed-radix tuple
        size_t c = 0;
        while (c < L * L) {
            if (++flat[c] < sc.mod[c % L]) break;
            flat[c] = 0;
            c++;
        }
        if (c == L * L) break;
    }
    return count;
}

BigRat w_weight(const SymplecticType& G, SpOrderCache& cache) {
    return BigRat(G.order(), cache.sp_order(G));
}

BigRat w_sum_exact(uint64_t p, uint32_t k) {
    BigRat out = BigRat(1, bigint_pow(BigInt(p), k));
    for (uint32_t j = 1; j <= k; j++) {
        BigInt d = bigint_pow(BigInt(p), 2 * j);
        out /= BigRat(d - 1, d);
    }
    return out;
}

std::vector<SymplecticType> symplectic_types_of_size(uint64_t p, uint32_t k) {
    std::vector<SymplecticType> out;
    for (const Partition& mu : partitions_of(k)) {
        std::vector<uint32_t> doubled;
        for (uint32_t e : mu.exps()) {
            doubled.push_back(e);
            doubled.push_back(e);
        }
        out.push_back({p, Partition(std::move(doubled))});
    }
    return out;
}

BigInt surjection_count(const SymplecticType& G, uint32_t n) {
    uint32_t d = uint32_t(G.part.parts());
    if (d > n) return 0;
    BigRat out = bigrat_pow(BigRat(G.order()), n);
    for (uint32_t i = 0; i < d; i++) {
        BigInt dd = bigint_pow(BigInt(G.p), n - i);
        out *= BigRat(dd - 1, dd);
    }
    if (boost::multiprecision::denominator(out) != 1)
        fail(errc::internal, "surjection_count: non-integer result");
    return boost::multiprecision::numerator(out);
}

BigRat pi_finite(const SymplecticType& G, uint32_t n, SpOrderCache& cache) {
    uint32_t d = uint32_t(G.part.parts());
    if (n < d || (n - d) % 2 != 0)
        fail(errc::invalid_argument, "pi_finite: need n >= dim G[p] with n - dim even");
    BigRat out(surjection_count(G, n), cache.sp_order(G));
    out *= gl_alt_ratio(n - d, G.p);
    out *= bigrat_pow(BigRat(G.order()), 1 - int64_t(n));
    return out;
}

ApproxProb pi_limit(const SymplecticType& G, uint32_t r, SpOrderCache& cache) {
    BigRat head = bigrat_pow(BigRat(G.order()), 1 - int64_t(r));
    head /= BigRat(cache.sp_order(G));
    EulerAlt e = euler_alt(r, G.p);
    return {to_double(head) * e.value, e.tail};
}

BigRat stratum_finite(const SymplecticType& G, uint32_t n, uint32_t r, SpOrderCache& cache) {
    if (r > n || (n - r) % 2 != 0)
        fail(errc::invalid_argument, "stratum_finite: need 0 <= r <= n with n - r even");
    BigRat out = bigrat_pow(BigRat(G.order()), -int64_t(r));
    out *= pi_finite(G, n - r, cache);
    out /= igusa(n - r, r, G.p);
    return out;
}

BigRat igusa(uint32_t n, uint32_t s, uint64_t p) {
    if (n % 2 != 0) fail(errc::invalid_argument, "igusa: n must be even");
    BigRat out = 1;
    for (uint32_t i = 1; i <= n / 2; i++) {
        BigInt d1 = bigint_pow(BigInt(p), 2 * i - 1);
        BigInt d2 = bigint_pow(BigInt(p), 2 * i - 1 + 2 * s);
        out *= BigRat(d1 - 1, d1) / BigRat(d2 - 1, d2);
    }
    return out;
}

BigInt ogr_count(uint32_t n, uint64_t p, uint32_t e) {
    if (e < 1) fail(errc::invalid_argument, "ogr_count: e >= 1");
    BigInt q = bigint_pow(BigInt(p), e);
    BigRat out = bigrat_pow(BigRat(q), int64_t(n) * (int64_t(n) - 1) / 2);
    for (uint32_t i = 1; i <= n; i++) {
        BigInt d = bigint_pow(BigInt(p), n - i);
        out *= BigRat(d + 1, d);
    }
    if (boost::multiprecision::denominator(out) != 1)
        fail(errc::internal, "ogr_count: non-integer result");
    return boost::multiprecision::numerator(out);
}

BigRat moment_finite(uint32_t m, uint32_t n, uint64_t p, uint32_t e) {
    if (m > n) fail(errc::invalid_argument, "moment_finite: m <= n required");
    BigInt q = bigint_pow(BigInt(p), e);
    BigRat out = bigrat_pow(BigRat(q), int64_t(m) * (m + 1) / 2);
    for (uint32_t i = 0; i < m; i++) {
        BigInt d = bigint_pow(BigInt(p), n - i);
        out *= BigRat(d - 1, d);
    }
    for (uint32_t i = n - m; i <= n - 1 && m > 0; i++) {
        BigInt d = bigint_pow(BigInt(p), i);
        out /= BigRat(d + 1, d);
    }
    return out;
}

BigInt moment_limit(uint32_t m, uint64_t p, uint32_t e) {
    return bigint_pow(bigint_pow(BigInt(p), e), uint64_t(m) * (m + 1) / 2);
}

BigInt count_injections(const Partition& G, uint32_t m, uint64_t p, uint32_t e) {
    const auto& lam = G.exps();
    const size_t L = lam.size();
    // G[q] componentwise: radix p^{min(lam_c, e)}, scaled into Z/p^{lam_c}.
    std::vector<uint64_t> radix(L), scale(L), mod(L), pl1(L);
    uint64_t card = 1;
    for (size_t c = 0; c < L; c++) {
        uint64_t mc = 1;
        for (uint32_t t = 0; t < std::min(lam[c], e); t++) mc *= p;
        uint64_t full = 1;
        for (uint32_t t = 0; t < lam[c]; t++) full *= p;
        radix[c] = mc;
        mod[c] = full;
        scale[c] = full / mc;
        pl1[c] = full / p; // p^{lam_c - 1}
        card *= mc;
    }
    double bits = double(m) * std::log2(double(std::max<uint64_t>(card, 1)));
    if (bits > 22) fail(errc::too_large, "count_injections: enumeration too large");
    if (m == 0) return 1;

    uint64_t pe1 = 1;
    for (uint32_t t = 0; t + 1 < e; t++) pe1 *= p; // p^{e-1}

    // Injective iff the elements p^{e-1} x_i are F_p-independent in G[p].
    std::vector<uint64_t> digits(m * L, 0);
    BigInt count = 0;
    std::vector<std::vector<uint64_t>> rows(m, std::vector<uint64_t>(L));
    PadicCtx fp(p, 1);
    for (;;) {
        for (size_t i = 0; i < m; i++)
            for (size_t c = 0; c < L; c++) {
                uint64_t x = digits[i * L + c] * scale[c];
                uint64_t y = (__uint128_t)x * pe1 % mod[c];
                rows[i][c] = y / pl1[c]; // F_p coordinate
            }
        // rank over F_p
        auto r = rows;
        size_t rank = 0;
        for (size_t col = 0; col < L && rank < m; col++) {
            size_t piv = rank;
            while (piv < m && r[piv][col] % p == 0) piv++;
            if (piv == m) continue;
            std::swap(r[piv], r[rank]);
            uint64_t inv = fp.unit_inv(r[rank][col] % p);
            for (size_t c2 = 0; c2 < L; c2++) r[rank][c2] = r[rank][c2] * inv % p;
            for (size_t i2 = 0; i2 < m; i2++) {
                if (i2 == rank) continue;
                uint64_t f = r[i2][col] % p;
                if (!f) continue;
                for (size_t c2 = 0; c2 < L; c2++)
                    r[i2][c2] = (r[i2][c2] + (p - f) * r[rank][c2]) % p;
            }
            rank++;
        }
        if (rank == m) count++;

        size_t t = 0;
        while (t < digits.size()) {
            if (++digits[t] < radix[t % L]) break;
            digits[t] = 0;
            t++;
        }
        if (t == digits.size()) break;
        if (digits.empty()) break;
    }
    return count;
}

BigInt injection_count_closed(const Partition& G, uint32_t m, uint64_t p, uint32_t e) {
    if (e < 1) fail(errc::invalid_argument, "injection_count_closed: e >= 1");
    if (m == 0) return 1;
    uint64_t t = 0, ker_exp = 0;
    for (uint32_t l : G.exps()) {
        if (l >= e) t++;
        ker_exp += std::min(l, e - 1);
    }
    if (t < m) return 0;
    BigInt pt = bigint_pow(BigInt(p), t);
    BigInt out = bigint_pow(bigint_pow(BigInt(p), ker_exp), m);
    BigInt pi = 1;
    for (uint32_t i = 0; i < m; i++) {
        out *= pt - pi;
        pi *= p;
    }
    return out;
}

BigRat prob_same_pairing(const std::vector<uint32_t>& e_half, uint32_t n, uint64_t p) {
    if (n != 2 * e_half.size())
        fail(errc::invalid_argument, "prob_same_pairing: n must equal 2*|e|");
    uint32_t m = 0;
    uint64_t esum = 0;
    for (uint32_t e : e_half) {
        if (e == 0) m += 2;
        esum += e;
    }
    BigRat out = gl_alt_ratio(m, p);
    out *= bigrat_pow(BigRat(1, p), int64_t(2 * esum) * (int64_t(n) - 1));
    return out;
}

ApproxProb prob_nonzero_T(uint32_t r, uint64_t p) {
    EulerAlt e = euler_alt(r, p);
    return {1.0 - e.value, e.value * e.tail};
}

} // namespace isoclass
