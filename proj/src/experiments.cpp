#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "alt.hpp"
#include "errors.hpp"
#include "quad.hpp"
#include "stats.hpp"

namespace isoclass {

using njson = nlohmann::json;

namespace {

const std::vector<std::string> kKinds = {
    "coker",       "stratum",    "rst",        "moment", "igusa",
    "pairing_match", "global_sha", "kernel_dim", "uniformity"};

uint32_t max_precision(uint64_t p) {
    uint32_t E = 0;
    __uint128_t q = 1;
    const __uint128_t limit = (__uint128_t)1 << 63;
    while (q * p < limit) {
        q *= p;
        E++;
    }
    return E;
}

std::vector<uint32_t> escalation_ladder(uint64_t p, uint32_t E, uint32_t E_cap) {
    uint32_t cap = std::min(E_cap ? E_cap : 8 * E, max_precision(p));
    std::vector<uint32_t> out{E};
    uint32_t cur = E;
    while (cur < cap) {
        cur = std::min(2 * cur, cap);
        out.push_back(cur);
    }
    return out;
}

struct Accum {
    std::map<Partition, uint64_t> hist;
    uint64_t unresolved = 0;
    uint64_t escalations = 0;
    uint64_t boundary = 0;
    uint64_t rejected = 0;
    std::array<uint64_t, 4> r_counts{0, 0, 0, 0}; // rank 0,1,2,>=3 (rst only)

    void merge(const Accum& o) {
        for (const auto& [k, v] : o.hist) hist[k] += v;
        unresolved += o.unresolved;
        escalations += o.escalations;
        boundary += o.boundary;
        rejected += o.rejected;
        for (size_t i = 0; i < 4; i++) r_counts[i] += o.r_counts[i];
    }
};

Partition value_label(uint64_t v) {
    if (v == 0) return Partition{};
    return Partition(std::vector<uint32_t>{uint32_t(v)});
}

uint64_t label_value(const Partition& p) { return p.empty() ? 0 : p.exps()[0]; }

template <class Trial>
Accum run_trials(uint64_t trials, uint32_t threads, Trial&& trial) {
    uint32_t nt = threads ? threads
                          : std::min<uint32_t>(8, std::max<uint32_t>(
                                                      1, std::thread::hardware_concurrency()));
    nt = std::max<uint32_t>(1, std::min<uint64_t>(nt, trials));
    std::vector<Accum> parts(nt);
    std::vector<std::thread> pool;
    uint64_t chunk = (trials + nt - 1) / nt;
    for (uint32_t t = 0; t < nt; t++) {
        uint64_t lo = t * chunk, hi = std::min(trials, lo + chunk);
        pool.emplace_back([&, t, lo, hi]() {
            for (uint64_t i = lo; i < hi; i++) trial(i, parts[t]);
        });
    }
    for (auto& th : pool) th.join();
    Accum total;
    for (const auto& a : parts) total.merge(a);
    return total;
}

struct TheoryRow {
    SymplecticType type;
    double fin = -1;  // finite-size law
    double lim = -1;  // limit law
};

// Symplectic types of size p^{2k} for k = 0..k_max with the matching finite
// and limit laws.  k_max keeps #G <= 2^16 so sp_order scans stay cheap.
// Types with more parts than the matrix size have finite-law probability 0.
// r = -1 (unconditioned rank/torsion split) compares against the equal
// mixture of the rank-0 and rank-1 limit laws.
std::vector<TheoryRow> partition_theory_table(const std::string& kind, uint64_t p,
                                              uint32_t n, int32_t r,
                                              SpOrderCache& cache) {
    uint32_t k_max = 0;
    while (2.0 * (k_max + 1) * std::log2(double(p)) <= 16.0) k_max++;
    std::vector<TheoryRow> rows;
    for (uint32_t k = 0; k <= k_max; k++) {
        for (SymplecticType& G : symplectic_types_of_size(p, k)) {
            TheoryRow row{std::move(G), -1, -1};
            uint32_t d = uint32_t(row.type.part.parts());
            if (kind == "coker") {
                row.fin = d <= n ? to_double(pi_finite(row.type, n, cache)) : 0.0;
                row.lim = pi_limit(row.type, 0, cache).value;
            } else if (kind == "stratum") {
                row.fin = d <= n - uint32_t(r)
                              ? to_double(stratum_finite(row.type, n, uint32_t(r), cache))
                              : 0.0;
                row.lim = pi_limit(row.type, uint32_t(r), cache).value;
            } else if (kind == "rst") {
                row.lim = r < 0 ? 0.5 * (pi_limit(row.type, 0, cache).value +
                                         pi_limit(row.type, 1, cache).value)
                                : pi_limit(row.type, uint32_t(r), cache).value;
            }
            if (row.fin >= 0 || row.lim >= 0) rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const TheoryRow& a, const TheoryRow& b) {
        return a.type.part < b.type.part;
    });
    return rows;
}

ComparisonReport build_partition_report(const std::string& kind, const Accum& acc,
                                        uint64_t resolved,
                                        const std::vector<TheoryRow>& table) {
    ComparisonReport rep;
    uint64_t listed = 0;
    double fin_mass = 0, lim_mass = 0;
    bool have_fin = !table.empty();
    for (const TheoryRow& t : table)
        if (t.fin < 0) have_fin = false;
    std::vector<uint64_t> counts;
    std::vector<double> probs;
    std::vector<double> emp, ref;
    for (const TheoryRow& t : table) {
        ClassRow row;
        row.label = t.type.part;
        auto it = acc.hist.find(row.label);
        row.count = it == acc.hist.end() ? 0 : it->second;
        row.empirical = resolved ? double(row.count) / double(resolved) : 0;
        row.theory = t.fin;
        row.theory_limit = t.lim;
        double pi = have_fin ? t.fin : t.lim;
        if (resolved && pi > 0 && pi < 1) row.z = binom_z(row.count, resolved, pi);
        listed += row.count;
        if (t.fin >= 0) fin_mass += t.fin;
        if (t.lim >= 0) lim_mass += t.lim;
        counts.push_back(row.count);
        probs.push_back(pi);
        emp.push_back(row.empirical);
        ref.push_back(pi);
        rep.classes.push_back(std::move(row));
    }
    rep.tail_count = resolved - listed;
    rep.tail_empirical = resolved ? double(rep.tail_count) / double(resolved) : 0;
    double ref_mass = have_fin ? fin_mass : lim_mass;
    rep.tail_theory = std::max(0.0, 1.0 - ref_mass);
    emp.push_back(rep.tail_empirical);
    ref.push_back(rep.tail_theory);
    rep.tv = tv_distance(emp, ref);
    if (resolved) {
        try {
            ChiSquareResult c =
                chi_square_binned(counts, probs, rep.tail_count, rep.tail_theory, resolved);
            rep.chi_stat = c.stat;
            rep.chi_dof = c.dof;
            rep.chi_pvalue = c.p_value;
        } catch (const error&) {
            // degenerate bucketing: leave the chi-square fields unset
        }
    }
    (void)kind;
    return rep;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const std::exception& e) {
        fail(errc::invalid_argument, std::string("config: bad JSON: ") + e.what());
    }
    if (!j.is_object()) fail(errc::invalid_argument, "config: expected a JSON object");
    ExperimentConfig c;
    for (auto& [key, val] : j.items()) {
        if (key == "kind") c.kind = val.get<std::string>();
        else if (key == "p") c.p = val.get<uint64_t>();
        else if (key == "E") c.E = val.get<uint32_t>();
        else if (key == "E_cap") c.E_cap = val.get<uint32_t>();
        else if (key == "n") c.n = val.get<uint32_t>();
        else if (key == "r") c.r = val.get<int32_t>();
        else if (key == "m") c.m = val.get<uint32_t>();
        else if (key == "s") c.s = val.get<uint32_t>();
        else if (key == "e") c.e = val.get<uint32_t>();
        else if (key == "e_list") c.e_list = val.get<std::vector<uint32_t>>();
        else if (key == "primes") c.primes = val.get<std::vector<uint64_t>>();
        else if (key == "n_list") c.n_list = val.get<std::vector<uint32_t>>();
        else if (key == "trials") c.trials = val.get<uint64_t>();
        else if (key == "seed" || key == "master_seed") c.master_seed = val.get<uint64_t>();
        else if (key == "threads") c.threads = val.get<uint32_t>();
        else fail(errc::invalid_argument, "config: unknown key '" + key + "'");
    }
    return c;
}

std::string ExperimentConfig::to_json() const {
    // The worker-thread count is an execution parameter, not part of the
    // experiment: it is accepted on input but never echoed, so reports are
    // byte-identical across thread counts.
    njson j;
    j["kind"] = kind;
    j["p"] = p;
    j["E"] = E;
    j["E_cap"] = E_cap;
    j["n"] = n;
    j["r"] = r;
    j["m"] = m;
    j["s"] = s;
    j["e"] = e;
    j["e_list"] = e_list;
    j["primes"] = primes;
    j["n_list"] = n_list;
    j["trials"] = trials;
    j["seed"] = master_seed;
    return j.dump();
}

namespace {

void validate(const ExperimentConfig& c) {
    if (std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end())
        fail(errc::invalid_argument, "config: unknown kind '" + c.kind + "'");
    if (c.trials < 1) fail(errc::invalid_argument, "config: trials >= 1");
    if (!is_prime_u64(c.p)) fail(errc::invalid_argument, "config: p must be prime");
    if (c.E < 1 || c.E > max_precision(c.p))
        fail(errc::invalid_argument, "config: E out of range for p");
    if (c.kind == "coker") {
        if (c.n < 2 || c.n % 2 != 0)
            fail(errc::invalid_argument, "coker: n must be even and >= 2");
    } else if (c.kind == "stratum" || c.kind == "global_sha") {
        if (c.r < 0) fail(errc::invalid_argument, "stratum: r >= 0 required");
        if (c.kind == "stratum" &&
            (uint32_t(c.r) > c.n || (c.n - uint32_t(c.r)) % 2 != 0))
            fail(errc::invalid_argument, "stratum: need 0 <= r <= n, n - r even");
        if (c.kind == "global_sha" && c.primes.empty())
            fail(errc::invalid_argument, "global_sha: primes required");
    } else if (c.kind == "rst") {
        if (c.n < 1) fail(errc::invalid_argument, "rst: n (half-rank) >= 1");
        if (c.E < 3) fail(errc::invalid_argument, "rst: E >= 3");
        if (c.r > 1)
            fail(errc::theory_unavailable,
                 "rst: conditioning on r >= 2 is reached through the stratum model only");
    } else if (c.kind == "moment") {
        if (c.e < 1 || c.m > c.n) fail(errc::invalid_argument, "moment: need e >= 1, m <= n");
    } else if (c.kind == "igusa") {
        if (c.n < 2 || c.n % 2 != 0) fail(errc::invalid_argument, "igusa: n even >= 2");
    } else if (c.kind == "pairing_match") {
        if (c.e_list.empty()) fail(errc::invalid_argument, "pairing_match: e_list required");
        uint32_t emax = *std::max_element(c.e_list.begin(), c.e_list.end());
        if (2 * emax >= c.E)
            fail(errc::invalid_argument, "pairing_match: needs E > 2*max(e_list)");
    } else if (c.kind == "kernel_dim" || c.kind == "uniformity") {
        if (c.n < 1) fail(errc::invalid_argument, c.kind + ": n >= 1");
    }
}

RunResult run_global_sha(const ExperimentConfig& cfg, SpOrderCache& cache);

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg_in, SpOrderCache& cache) {
    ExperimentConfig cfg = cfg_in;
    // sweeps validate each per-n sub-configuration as it runs
    if (!cfg.n_list.empty() && cfg.kind != "global_sha") return convergence_sweep(cfg, cache);
    validate(cfg);
    if (cfg.kind == "global_sha") return run_global_sha(cfg, cache);

    const uint64_t seed = cfg.master_seed;
    std::vector<uint32_t> ladder = escalation_ladder(cfg.p, cfg.E, cfg.E_cap);

    // Escalation levels re-run the very same trial seed at a higher
    // precision: the digit-plane samplers then refine the level-E sample
    // instead of redrawing it, so boundary classes keep their exact mass.
    Accum acc;
    if (cfg.kind == "coker") {
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            for (size_t lvl = 0; lvl < ladder.size(); lvl++) {
                PadicCtx ctx(cfg.p, ladder[lvl]);
                Rng rng(derive_seed(seed, i, 0));
                AltMat A = sample_alt_haar(cfg.n, ctx, rng);
                CokernelShape sh = cokernel_shape(A.to_mat(ctx), ctx);
                if (sh.free_rank == 0 && sh.resolved) {
                    a.hist[sh.tors]++;
                    return;
                }
                if (lvl + 1 < ladder.size()) a.escalations++;
            }
            a.unresolved++;
        });
    } else if (cfg.kind == "stratum") {
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            for (size_t lvl = 0; lvl < ladder.size(); lvl++) {
                PadicCtx ctx(cfg.p, ladder[lvl]);
                Rng rng(derive_seed(seed, i, 0));
                CokernelShape sh =
                    coker_tors_sample(cfg.n, uint32_t(cfg.r), ctx, rng, &a.boundary);
                if (sh.resolved) {
                    a.hist[sh.tors]++;
                    return;
                }
                if (lvl + 1 < ladder.size()) a.escalations++;
            }
            a.unresolved++;
        });
    } else if (cfg.kind == "rst") {
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            const uint64_t kMaxCandidates = 4096;
            for (uint64_t cand = 0; cand < kMaxCandidates; cand++) {
                uint64_t cand_seed = derive_seed(seed, i, cand);
                bool resolved = false;
                RankTorsion rt;
                for (size_t lvl = 0; lvl < ladder.size(); lvl++) {
                    PadicCtx ctx(cfg.p, ladder[lvl]);
                    HyperbolicSpace sp(cfg.n, ctx);
                    Rng rng(cand_seed);
                    IsotropicSummand Z = sample_ogr(sp, rng);
                    rt = rank_torsion_extract(Z, IsotropicSummand::standard_w(sp), sp);
                    // A resolved read of r >= 2 is a truncation signature:
                    // torsion exponents pair up, so a class [e,e] with e >= E
                    // tracks the precision exactly like two rank directions,
                    // while the true rank-(>=2) locus carries measure zero.
                    bool trustworthy = rt.resolved && rt.r <= 1;
                    if (trustworthy) {
                        resolved = true;
                        break;
                    }
                    if (lvl + 1 < ladder.size()) a.escalations++;
                }
                if (!resolved) {
                    if (rt.resolved) a.r_counts[std::min<uint32_t>(rt.r, 3)]++;
                    a.unresolved++; // includes any persistent r >= 2 read
                    return;
                }
                a.r_counts[rt.r]++;
                if (cfg.r < 0 || rt.r == uint32_t(cfg.r)) {
                    a.hist[rt.T]++;
                    return;
                }
                a.rejected++;
            }
            a.unresolved++;
        });
    } else if (cfg.kind == "moment") {
        PadicCtx ctx(cfg.p, cfg.e);
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            HyperbolicSpace sp(cfg.n, ctx);
            Rng rng(derive_seed(seed, i, 0));
            IsotropicSummand Z = sample_ogr(sp, rng);
            Partition G = intersect(Z, IsotropicSummand::standard_w(sp), sp, cfg.e);
            BigInt v = injection_count_closed(G, cfg.m, cfg.p, cfg.e);
            a.hist[value_label(v.convert_to<uint64_t>())]++;
        });
    } else if (cfg.kind == "igusa") {
        PadicCtx ctx(cfg.p, cfg.E);
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            Rng rng(derive_seed(seed, i, 0));
            AltMat A = sample_alt_haar(cfg.n, ctx, rng);
            uint32_t v = det_valuation(A.to_mat(ctx), ctx);
            if (v >= ctx.E()) a.boundary++;
            a.hist[value_label(v)]++;
        });
    } else if (cfg.kind == "pairing_match") {
        PadicCtx ctx(cfg.p, cfg.E);
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            Rng rng(derive_seed(seed, i, 0));
            AltMat A = sample_alt_haar(2 * cfg.e_list.size(), ctx, rng);
            a.hist[value_label(same_pairing_standard(A, cfg.e_list, ctx) ? 1 : 0)]++;
        });
    } else if (cfg.kind == "kernel_dim") {
        PadicCtx ctx(cfg.p, 1);
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            Rng rng(derive_seed(seed, i, 0));
            AltMat A = sample_alt_haar(cfg.n, ctx, rng);
            uint64_t d = cfg.n - rank_mod_p(A.to_mat(ctx), ctx);
            a.hist[value_label(d)]++;
        });
    } else if (cfg.kind == "uniformity") {
        PadicCtx ctx(cfg.p, cfg.E);
        std::vector<IsotropicSummand> classes = enumerate_ogr(cfg.n, cfg.p, cfg.E);
        std::map<std::vector<uint64_t>, size_t> index;
        for (size_t c = 0; c < classes.size(); c++) index[classes[c].basis().data()] = c;
        acc = run_trials(cfg.trials, cfg.threads, [&](uint64_t i, Accum& a) {
            HyperbolicSpace sp(cfg.n, ctx);
            Rng rng(derive_seed(seed, i, 0));
            IsotropicSummand Z = sample_ogr(sp, rng);
            auto it = index.find(Z.basis().data());
            if (it == index.end()) fail(errc::internal, "sampled summand not in enumeration");
            a.hist[value_label(it->second + 1)]++;
        });
    }

    RunResult out;
    out.config = cfg;
    out.dist.counts = acc.hist;
    out.dist.trials = cfg.trials;
    out.dist.unresolved = acc.unresolved;
    out.dist.escalations = acc.escalations;
    out.dist.boundary_resamples = acc.boundary;
    out.dist.rejected_conditioning = acc.rejected;
    out.dist.master_seed = seed;
    const uint64_t resolved = cfg.trials - acc.unresolved;

    if (cfg.kind == "coker" || cfg.kind == "stratum" || cfg.kind == "rst") {
        int32_t r = cfg.kind == "coker" ? 0 : cfg.r;
        auto table = partition_theory_table(cfg.kind, cfg.p, cfg.n, r, cache);
        out.report = build_partition_report(cfg.kind, acc, resolved, table);
        if (cfg.kind == "rst") {
            uint64_t rtot = 0;
            for (auto c : acc.r_counts) rtot += c;
            out.report.extras["rank0_count"] = double(acc.r_counts[0]);
            out.report.extras["rank1_count"] = double(acc.r_counts[1]);
            out.report.extras["rank2_count"] = double(acc.r_counts[2]);
            out.report.extras["rank3plus_count"] = double(acc.r_counts[3]);
            if (rtot) {
                out.report.extras["prob_rank0"] = double(acc.r_counts[0]) / double(rtot);
                out.report.extras["prob_rank0_z"] =
                    binom_z(acc.r_counts[0], rtot, 0.5);
            }
        }
    } else if (cfg.kind == "moment") {
        MeanVar mv;
        ComparisonReport rep;
        for (const auto& [lab, cnt] : acc.hist) {
            ClassRow row;
            row.label = lab;
            row.count = cnt;
            row.empirical = double(cnt) / double(resolved);
            rep.classes.push_back(row);
            double v = double(label_value(lab));
            for (uint64_t t = 0; t < cnt; t++) mv.add(v);
        }
        double theory = to_double(moment_finite(cfg.m, cfg.n, cfg.p, cfg.e));
        double limit = moment_limit(cfg.m, cfg.p, cfg.e).convert_to<double>();
        rep.extras["mean"] = mv.mean;
        rep.extras["stderr"] = mv.stderr_mean();
        rep.extras["theory_mean"] = theory;
        rep.extras["theory_limit"] = limit;
        if (mv.stderr_mean() > 0)
            rep.extras["z"] = (mv.mean - theory) / mv.stderr_mean();
        out.report = std::move(rep);
    } else if (cfg.kind == "igusa") {
        ComparisonReport rep;
        double mean = 0, mean2 = 0;
        for (const auto& [lab, cnt] : acc.hist) {
            ClassRow row;
            row.label = lab;
            row.count = cnt;
            row.empirical = double(cnt) / double(resolved);
            rep.classes.push_back(row);
            double x = std::pow(double(cfg.p), -double(cfg.s) * double(label_value(lab)));
            mean += x * double(cnt);
            mean2 += x * x * double(cnt);
        }
        mean /= double(resolved);
        mean2 /= double(resolved);
        double var = std::max(0.0, mean2 - mean * mean);
        double se = std::sqrt(var / double(resolved));
        double theory = to_double(igusa(cfg.n, cfg.s, cfg.p));
        rep.extras["mean"] = mean;
        rep.extras["stderr"] = se;
        rep.extras["theory_mean"] = theory;
        if (se > 0) rep.extras["z"] = (mean - theory) / se;
        out.report = std::move(rep);
    } else if (cfg.kind == "pairing_match") {
        ComparisonReport rep;
        uint64_t hits = 0;
        auto it = acc.hist.find(value_label(1));
        if (it != acc.hist.end()) hits = it->second;
        double theory =
            to_double(prob_same_pairing(cfg.e_list, 2 * cfg.e_list.size(), cfg.p));
        ClassRow row;
        row.label = value_label(1);
        row.count = hits;
        row.empirical = double(hits) / double(resolved);
        row.theory = theory;
        row.z = binom_z(hits, resolved, theory);
        rep.classes.push_back(row);
        rep.extras["empirical"] = row.empirical;
        rep.extras["theory"] = theory;
        rep.extras["z"] = row.z;
        out.report = std::move(rep);
    } else if (cfg.kind == "kernel_dim") {
        ComparisonReport rep;
        for (const auto& [lab, cnt] : acc.hist) {
            ClassRow row;
            row.label = lab;
            row.count = cnt;
            row.empirical = double(cnt) / double(resolved);
            rep.classes.push_back(row);
        }
        uint64_t big = 0;
        for (const auto& [lab, cnt] : acc.hist)
            if (2 * label_value(lab) >= cfg.n) big += cnt;
        rep.extras["prob_kernel_at_least_half"] = double(big) / double(resolved);
        out.report = std::move(rep);
    } else if (cfg.kind == "uniformity") {
        BigInt cls = ogr_count(cfg.n, cfg.p, cfg.E);
        uint64_t k = cls.convert_to<uint64_t>();
        ComparisonReport rep;
        std::vector<uint64_t> counts(k, 0);
        for (const auto& [lab, cnt] : acc.hist) counts[label_value(lab) - 1] = cnt;
        std::vector<double> probs(k, 1.0 / double(k));
        ChiSquareResult c = chi_square_binned(counts, probs, 0, 0.0, resolved);
        rep.chi_stat = c.stat;
        rep.chi_dof = c.dof;
        rep.chi_pvalue = c.p_value;
        for (size_t i = 0; i < k; i++) {
            ClassRow row;
            row.label = value_label(i + 1);
            row.count = counts[i];
            row.empirical = double(counts[i]) / double(resolved);
            row.theory = probs[i];
            row.z = binom_z(counts[i], resolved, probs[i]);
            rep.classes.push_back(row);
        }
        rep.extras["classes"] = double(k);
        out.report = std::move(rep);
    }
    return out;
}

namespace {

RunResult run_global_sha(const ExperimentConfig& cfg, SpOrderCache& cache) {
    RunResult out;
    out.config = cfg;
    out.dist.trials = cfg.trials;
    out.dist.master_seed = cfg.master_seed;
    for (uint64_t pr : cfg.primes) {
        ExperimentConfig sub;
        sub.kind = "stratum";
        sub.p = pr;
        sub.r = cfg.r;
        // default core size: large enough that the finite-size law sits well
        // inside Monte Carlo noise of the limit law
        sub.n = cfg.n ? cfg.n : uint32_t(cfg.r) + 10;
        sub.E = std::min(cfg.E, max_precision(pr));
        sub.E_cap = cfg.E_cap;
        sub.trials = cfg.trials;
        sub.threads = cfg.threads;
        sub.master_seed = derive_seed(cfg.master_seed, pr, 0xa11);
        RunResult r = run_experiment(sub, cache);
        uint64_t resolved = r.dist.trials - r.dist.unresolved;
        uint64_t zero = 0;
        auto it = r.dist.counts.find(Partition{});
        if (it != r.dist.counts.end()) zero = it->second;
        uint64_t nonzero = resolved - zero;
        double fin = 1.0 - to_double(stratum_finite({pr, Partition{}}, sub.n,
                                                    uint32_t(cfg.r), cache));
        double lim = prob_nonzero_T(uint32_t(cfg.r), pr).value;
        std::map<std::string, double> row;
        row["p"] = double(pr);
        row["n"] = double(sub.n);
        row["resolved"] = double(resolved);
        row["prob_nonzero"] = resolved ? double(nonzero) / double(resolved) : 0;
        row["theory_finite"] = fin;
        row["theory_limit"] = lim;
        if (resolved) {
            row["z_finite"] = binom_z(nonzero, resolved, fin);
            row["z_limit"] = binom_z(nonzero, resolved, lim);
        }
        out.series.push_back(std::move(row));
        out.dist.unresolved += r.dist.unresolved;
        out.dist.escalations += r.dist.escalations;
        out.dist.boundary_resamples += r.dist.boundary_resamples;
    }
    return out;
}

} // namespace

RunResult convergence_sweep(const ExperimentConfig& cfg, SpOrderCache& cache) {
    if (cfg.n_list.empty()) fail(errc::invalid_argument, "sweep: n_list required");
    RunResult out;
    out.config = cfg;
    RunResult last;
    for (uint32_t n : cfg.n_list) {
        ExperimentConfig sub = cfg;
        sub.n_list.clear();
        sub.n = n;
        sub.master_seed = derive_seed(cfg.master_seed, n, 0x5eed);
        RunResult r = run_experiment(sub, cache);
        uint64_t resolved = r.dist.trials - r.dist.unresolved;

        std::map<std::string, double> row;
        row["n"] = double(n);
        row["resolved"] = double(resolved);
        if (cfg.kind == "coker" || cfg.kind == "stratum" || cfg.kind == "rst") {
            // TV distance to the limit law over the tabulated classes.
            std::vector<uint64_t> counts;
            std::vector<double> ref;
            double mass = 0;
            uint64_t listed = 0;
            for (const ClassRow& c : r.report.classes) {
                counts.push_back(c.count);
                ref.push_back(std::max(0.0, c.theory_limit));
                mass += std::max(0.0, c.theory_limit);
                listed += c.count;
            }
            std::vector<double> emp;
            for (size_t i = 0; i < counts.size(); i++)
                emp.push_back(resolved ? double(counts[i]) / double(resolved) : 0);
            emp.push_back(resolved ? double(resolved - listed) / double(resolved) : 0);
            ref.push_back(std::max(0.0, 1.0 - mass));
            double tv = tv_distance(emp, ref);
            ref.pop_back();
            double sd = bootstrap_tv_sd(counts, resolved - listed, ref,
                                        std::max(0.0, 1.0 - mass), resolved, 200,
                                        derive_seed(cfg.master_seed, n, 0xb5));
            row["tv_to_limit"] = tv;
            row["tv_bootstrap_sd"] = sd;
        }
        if (cfg.kind == "kernel_dim")
            row["prob_kernel_at_least_half"] =
                r.report.extras["prob_kernel_at_least_half"];
        if (cfg.kind == "rst" && r.report.extras.count("prob_rank0"))
            row["prob_rank0"] = r.report.extras["prob_rank0"];
        out.series.push_back(std::move(row));
        last = std::move(r);
    }
    out.dist = last.dist;
    out.report = last.report;
    return out;
}

// ------------------------------------------------------------------ output

namespace {

njson report_json(const RunResult& r) {
    njson j;
    j["schema_version"] = 1;
    j["config"] = njson::parse(r.config.to_json());
    j["seed"] = r.config.master_seed;
    njson res;
    res["trials"] = r.dist.trials;
    res["resolved"] = r.dist.trials - r.dist.unresolved;
    res["unresolved"] = r.dist.unresolved;
    res["escalations"] = r.dist.escalations;
    res["boundary_resamples"] = r.dist.boundary_resamples;
    res["rejected_conditioning"] = r.dist.rejected_conditioning;
    njson classes = njson::array();
    for (const ClassRow& c : r.report.classes) {
        njson row;
        row["partition"] = c.label.to_string();
        row["count"] = c.count;
        row["empirical"] = c.empirical;
        if (c.theory >= 0) row["theory"] = c.theory;
        if (c.theory_limit >= 0) row["theory_limit"] = c.theory_limit;
        row["z"] = c.z;
        classes.push_back(row);
    }
    res["classes"] = classes;
    if (r.report.tail_theory >= 0) {
        njson tail;
        tail["count"] = r.report.tail_count;
        tail["empirical"] = r.report.tail_empirical;
        tail["theory"] = r.report.tail_theory;
        res["tail"] = tail;
    }
    if (r.report.chi_pvalue >= 0) {
        njson chi;
        chi["stat"] = r.report.chi_stat;
        chi["dof"] = r.report.chi_dof;
        chi["p_value"] = r.report.chi_pvalue;
        res["chi_square"] = chi;
    }
    if (r.report.tv >= 0) res["tv_distance"] = r.report.tv;
    if (!r.report.extras.empty()) {
        njson ex;
        for (const auto& [k, v] : r.report.extras) ex[k] = v;
        res["extras"] = ex;
    }
    if (!r.series.empty()) {
        njson s = njson::array();
        for (const auto& row : r.series) {
            njson jr;
            for (const auto& [k, v] : row) jr[k] = v;
            s.push_back(jr);
        }
        res["series"] = s;
    }
    j["results"] = res;
    return j;
}

} // namespace

std::string RunResult::to_json() const { return report_json(*this).dump(2) + "\n"; }

std::string RunResult::to_csv() const {
    std::string s = "partition,count,empirical,theory,theory_limit,z\n";
    auto num = [](double v) { return v >= 0 ? std::to_string(v) : std::string(); };
    for (const ClassRow& c : report.classes) {
        s += "\"" + c.label.to_string() + "\"," + std::to_string(c.count) + "," +
             std::to_string(c.empirical) + "," + num(c.theory) + "," +
             num(c.theory_limit) + "," + std::to_string(c.z) + "\n";
    }
    if (report.tail_theory >= 0)
        s += "\"<tail>\"," + std::to_string(report.tail_count) + "," +
             std::to_string(report.tail_empirical) + "," +
             std::to_string(report.tail_theory) + ",,\n";
    return s;
}

std::string RunResult::to_pretty() const {
    std::string s;
    s += "kind: " + config.kind + "  p=" + std::to_string(config.p) +
         "  n=" + std::to_string(config.n) + "  trials=" + std::to_string(dist.trials) +
         "  seed=" + std::to_string(config.master_seed) + "\n";
    s += "resolved=" + std::to_string(dist.trials - dist.unresolved) +
         " unresolved=" + std::to_string(dist.unresolved) +
         " escalations=" + std::to_string(dist.escalations) + "\n";
    bool partition_kind =
        config.kind == "coker" || config.kind == "stratum" || config.kind == "rst";
    for (const ClassRow& c : report.classes) {
        std::string name =
            partition_kind ? c.label.pretty(config.p) : std::to_string(label_value(c.label));
        s += "  " + name + ": count=" + std::to_string(c.count) +
             " empirical=" + std::to_string(c.empirical);
        if (c.theory >= 0) s += " theory=" + std::to_string(c.theory);
        if (c.theory_limit >= 0) s += " limit=" + std::to_string(c.theory_limit);
        s += " z=" + std::to_string(c.z) + "\n";
    }
    if (report.tail_theory >= 0)
        s += "  <tail>: count=" + std::to_string(report.tail_count) +
             " empirical=" + std::to_string(report.tail_empirical) +
             " theory=" + std::to_string(report.tail_theory) + "\n";
    if (report.chi_pvalue >= 0)
        s += "chi_square stat=" + std::to_string(report.chi_stat) +
             " dof=" + std::to_string(report.chi_dof) +
             " p=" + std::to_string(report.chi_pvalue) + "\n";
    if (report.tv >= 0) s += "tv_distance=" + std::to_string(report.tv) + "\n";
    for (const auto& [k, v] : report.extras) s += k + "=" + std::to_string(v) + "\n";
    for (const auto& row : series) {
        s += "series:";
        for (const auto& [k, v] : row) s += " " + k + "=" + std::to_string(v);
        s += "\n";
    }
    return s;
}

} // namespace isoclass
