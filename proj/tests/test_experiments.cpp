#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "experiments.hpp"
#include "stats.hpp"

using namespace isoclass;
using njson = nlohmann::json;

namespace {

ExperimentConfig base(const std::string& kind) {
    ExperimentConfig c;
    c.kind = kind;
    c.master_seed = 12345;
    c.trials = 10000;
    c.threads = 2;
    return c;
}

} // namespace

TEST_CASE("statistics helpers") {
    CHECK(tv_distance({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(tv_distance({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(chi_square_pvalue(0.0, 5) == doctest::Approx(1.0));
    CHECK(chi_square_pvalue(38.932, 21) == doctest::Approx(0.01).epsilon(0.05));
    CHECK(binom_z(50, 100, 0.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(chi_square_binned({1}, {1.0}, 0, 0.0, 1), error);
}

TEST_CASE("config json round trip and validation") {
    ExperimentConfig c = base("coker");
    c.p = 3;
    c.E = 6;
    c.n = 4;
    c.e_list = {0, 1};
    c.primes = {2, 3};
    ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.kind == c.kind);
    CHECK(back.p == 3);
    CHECK(back.e_list == c.e_list);
    CHECK(back.primes == c.primes);

    CHECK_THROWS_AS(ExperimentConfig::from_json("{\"nope\": 1}"), error);
    CHECK_THROWS_AS(ExperimentConfig::from_json("not json"), error);

    SpOrderCache cache;
    ExperimentConfig bad = base("coker");
    bad.n = 3; // odd
    CHECK_THROWS_AS(run_experiment(bad, cache), error);
    ExperimentConfig bad2 = base("stratum");
    bad2.n = 4;
    bad2.r = 1; // n - r odd
    CHECK_THROWS_AS(run_experiment(bad2, cache), error);
    ExperimentConfig bad3 = base("rst");
    bad3.n = 3;
    bad3.r = 2; // only reachable through the stratum model
    CHECK_THROWS_AS(run_experiment(bad3, cache), error);
}

TEST_CASE("determinism across runs and thread counts") {
    SpOrderCache cache;
    ExperimentConfig c = base("coker");
    c.n = 4;
    c.E = 6;
    c.trials = 4000;
    c.threads = 1;
    std::string r1 = run_experiment(c, cache).to_json();
    c.threads = 8;
    std::string r8 = run_experiment(c, cache).to_json();
    CHECK(r1 == r8);
    std::string again = run_experiment(c, cache).to_json();
    CHECK(r8 == again);

    c.master_seed = 999;
    CHECK(run_experiment(c, cache).to_json() != r1);
}

TEST_CASE("coker run matches the finite-size law") {
    SpOrderCache cache;
    ExperimentConfig c = base("coker");
    c.n = 2;
    c.E = 8;
    c.trials = 20000;
    RunResult r = run_experiment(c, cache);
    CHECK(r.dist.trials == c.trials);
    uint64_t sum = r.dist.unresolved;
    for (const auto& [k, v] : r.dist.counts) sum += v;
    CHECK(sum == c.trials); // conservation

    bool found = false;
    for (const ClassRow& row : r.report.classes) {
        if (row.label.empty()) {
            found = true;
            CHECK(row.theory == doctest::Approx(0.5));
            CHECK(std::fabs(row.z) < 4.0);
        }
        if (row.theory >= 0.01) CHECK(std::fabs(row.z) < 4.5);
    }
    CHECK(found);
    CHECK(r.report.chi_pvalue > 1e-3);
    CHECK(r.report.tv < 0.02);
}

TEST_CASE("stratum run matches the finite-size law") {
    SpOrderCache cache;
    ExperimentConfig c = base("stratum");
    c.n = 3;
    c.r = 1;
    c.E = 8;
    c.trials = 20000;
    RunResult r = run_experiment(c, cache);
    for (const ClassRow& row : r.report.classes)
        if (row.label.empty()) {
            CHECK(row.theory == doctest::Approx(7.0 / 8.0));
            CHECK(std::fabs(row.z) < 4.0);
        }
}

TEST_CASE("rank/torsion run: rank split and conditioning") {
    SpOrderCache cache;
    ExperimentConfig c = base("rst");
    c.n = 2;
    c.E = 8;
    c.trials = 10000;
    RunResult r = run_experiment(c, cache);
    CHECK(r.report.extras.at("rank2_count") == 0);
    CHECK(r.report.extras.at("rank3plus_count") == 0);
    CHECK(std::fabs(r.report.extras.at("prob_rank0_z")) < 4.0);

    c.r = 0; // condition on rank 0
    RunResult r0 = run_experiment(c, cache);
    uint64_t sum = r0.dist.unresolved;
    for (const auto& [k, v] : r0.dist.counts) sum += v;
    CHECK(sum == c.trials);
    CHECK(r0.dist.rejected_conditioning > 0);
}

TEST_CASE("moment run matches the finite-size average") {
    SpOrderCache cache;
    ExperimentConfig c = base("moment");
    c.n = 4;
    c.e = 1;
    c.m = 1;
    c.E = 1;
    c.trials = 20000;
    RunResult r = run_experiment(c, cache);
    CHECK(std::fabs(r.report.extras.at("z")) < 4.0);
    CHECK(r.report.extras.at("theory_mean") ==
          doctest::Approx(to_double(moment_finite(1, 4, 2, 1))));
}

TEST_CASE("igusa run") {
    SpOrderCache cache;
    ExperimentConfig c = base("igusa");
    c.n = 2;
    c.s = 1;
    c.E = 12;
    c.trials = 20000;
    RunResult r = run_experiment(c, cache);
    CHECK(r.report.extras.at("theory_mean") == doctest::Approx(4.0 / 7.0));
    CHECK(std::fabs(r.report.extras.at("z")) < 4.0);
}

TEST_CASE("pairing-match run") {
    SpOrderCache cache;
    ExperimentConfig c = base("pairing_match");
    c.e_list = {0};
    c.E = 4;
    c.trials = 20000;
    RunResult r = run_experiment(c, cache);
    CHECK(r.report.extras.at("theory") == doctest::Approx(0.5));
    CHECK(std::fabs(r.report.extras.at("z")) < 4.0);
}

TEST_CASE("kernel-dimension sweep is nonincreasing") {
    SpOrderCache cache;
    ExperimentConfig c = base("kernel_dim");
    c.n_list = {2, 4, 8, 16};
    c.trials = 10000;
    RunResult r = run_experiment(c, cache);
    REQUIRE(r.series.size() == 4);
    // the tail peaks at n=4 (9/16) and then falls towards zero
    std::vector<double> fracs;
    for (const auto& row : r.series) fracs.push_back(row.at("prob_kernel_at_least_half"));
    for (size_t i = 1; i + 1 < fracs.size(); i++) CHECK(fracs[i + 1] <= fracs[i] + 0.02);
    CHECK(fracs.back() < 0.05);
}

TEST_CASE("uniformity run") {
    SpOrderCache cache;
    ExperimentConfig c = base("uniformity");
    c.n = 2;
    c.p = 2;
    c.E = 2;
    c.trials = 20000;
    RunResult r = run_experiment(c, cache);
    CHECK(r.report.classes.size() == 12);
    CHECK(r.report.chi_pvalue > 1e-3);
}

TEST_CASE("global run: per-prime nonzero-torsion probabilities") {
    SpOrderCache cache;
    ExperimentConfig c = base("global_sha");
    c.r = 1;
    c.primes = {2, 3, 5, 7, 11, 13};
    c.E = 8;
    c.trials = 8000;
    RunResult r = run_experiment(c, cache);
    REQUIRE(r.series.size() == 6);
    for (const auto& row : r.series) {
        CHECK(std::fabs(row.at("z_finite")) < 4.0);
        // the default core size keeps the finite-size law within noise of the
        // limit law, so the limit comparison holds as well
        CHECK(std::fabs(row.at("z_limit")) < 4.0);
        CHECK(row.at("theory_limit") > 0);
        CHECK(row.at("theory_limit") < 1);
    }
}

TEST_CASE("rank/torsion convergence sweep has the expected columns") {
    SpOrderCache cache;
    ExperimentConfig c = base("rst");
    c.r = 0;
    c.E = 8;
    c.n_list = {2, 3};
    c.trials = 4000;
    RunResult r = run_experiment(c, cache);
    REQUIRE(r.series.size() == 2);
    for (const auto& row : r.series) {
        CHECK(row.count("tv_to_limit"));
        CHECK(row.count("tv_bootstrap_sd"));
    }
}

TEST_CASE("json report structure round-trips") {
    SpOrderCache cache;
    ExperimentConfig c = base("coker");
    c.n = 2;
    c.E = 6;
    c.trials = 2000;
    RunResult r = run_experiment(c, cache);
    njson j = njson::parse(r.to_json());
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("seed") == c.master_seed);
    ExperimentConfig echo = ExperimentConfig::from_json(j.at("config").dump());
    CHECK(echo.kind == "coker");
    CHECK(echo.trials == 2000);
    const njson& res = j.at("results");
    CHECK(res.at("trials").get<uint64_t>() == 2000);
    uint64_t total = res.at("unresolved").get<uint64_t>() +
                     res.at("tail").at("count").get<uint64_t>();
    for (const njson& row : res.at("classes")) total += row.at("count").get<uint64_t>();
    CHECK(total == 2000);
    CHECK(r.to_csv().find("partition,count") == 0);
    CHECK(r.to_pretty().find("kind: coker") == 0);
}
