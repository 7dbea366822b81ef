#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "partition.hpp"
#include "theory.hpp"

namespace isoclass {

// One Monte Carlo run.  `kind` selects the sampled model:
//   coker         torsion of coker(A), Haar alternating n x n
//   stratum       torsion of coker(A) on the corank-r stratum
//   rst           rank/torsion split of a random maximal isotropic Z against
//                 the standard W in a rank-2n hyperbolic module (config n is
//                 the half-rank); r = -1 samples unconditioned, r in {0,1}
//                 conditions by rejection
//   moment        injection count I_m(Z cap W) at level q = p^e
//   igusa         valuation of det of a Haar alternating matrix; reports
//                 the average of |det|^s
//   pairing_match fraction of Haar A inducing the pairing of the standard
//                 block matrix with half-exponents e_list
//   global_sha    per-prime Prob(torsion != 0) on the corank-r stratum
//   kernel_dim    dim ker(A mod p) for Haar alternating A
//   uniformity    sampled maximal isotropic summands against the enumerated
//                 classes of OGr_n(Z/p^E)
struct ExperimentConfig {
    std::string kind;
    uint64_t p = 2;
    uint32_t E = 8;
    uint32_t E_cap = 0; // 0: four doublings of E (clamped to the residue bound)
    uint32_t n = 0;
    int32_t r = -1;
    uint32_t m = 1;
    uint32_t s = 1;
    uint32_t e = 1;
    std::vector<uint32_t> e_list;
    std::vector<uint64_t> primes;
    std::vector<uint32_t> n_list; // non-empty: convergence sweep over n
    uint64_t trials = 10000;
    uint64_t master_seed = 0;
    uint32_t threads = 0; // 0: hardware concurrency (capped at 8)

    static ExperimentConfig from_json(const std::string& json_text);
    std::string to_json() const;
};

struct EmpiricalDist {
    std::map<Partition, uint64_t> counts;
    uint64_t trials = 0;
    uint64_t unresolved = 0;
    uint64_t escalations = 0;
    uint64_t boundary_resamples = 0;
    uint64_t rejected_conditioning = 0;
    uint64_t master_seed = 0;
};

struct ClassRow {
    Partition label;
    uint64_t count = 0;
    double empirical = 0;
    double theory = -1;       // < 0: no finite-size law
    double theory_limit = -1; // < 0: no limit law
    double z = 0;
};

struct ComparisonReport {
    std::vector<ClassRow> classes;
    uint64_t tail_count = 0;
    double tail_empirical = 0;
    double tail_theory = -1;
    double chi_stat = -1;
    uint64_t chi_dof = 0;
    double chi_pvalue = -1;
    double tv = -1;          // against the finite law when present, else limit
    std::map<std::string, double> extras;
};

struct RunResult {
    ExperimentConfig config;
    EmpiricalDist dist;
    ComparisonReport report;
    std::vector<std::map<std::string, double>> series; // sweeps, per-prime rows

    std::string to_json() const;
    std::string to_csv() const;
    std::string to_pretty() const;
};

RunResult run_experiment(const ExperimentConfig& cfg, SpOrderCache& cache);

// TV series of the empirical law at each n against the limit law, with
// bootstrap noise estimates.
RunResult convergence_sweep(const ExperimentConfig& cfg, SpOrderCache& cache);

} // namespace isoclass
