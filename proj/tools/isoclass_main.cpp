// Command-line front end for the isoclass shared library.  Everything flows
// through the C API: experiment configs go in as JSON, reports come back as
// JSON, and this tool only parses flags and renders output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isoclass.h"

using njson = nlohmann::json;

namespace {

struct SessionDeleter {
    void operator()(isx_session* s) const { isx_session_free(s); }
};
using Session = std::unique_ptr<isx_session, SessionDeleter>;

struct StrDeleter {
    void operator()(char* s) const { isx_free(s); }
};
using CStr = std::unique_ptr<char, StrDeleter>;

int exit_code_for(int status) {
    switch (status) {
        case ISX_OK: return 0;
        case ISX_ERR_STAT_TEST: return 1;
        case ISX_ERR_USAGE: return 2;
        default: return 3;
    }
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) {
        std::cerr << "error: cannot write " << out_path << "\n";
        std::exit(3);
    }
    f << text;
}

std::string pretty_partition(const std::string& part, uint64_t p) {
    if (part.empty()) return "0";
    std::string out;
    size_t pos = 0;
    while (pos < part.size()) {
        size_t comma = part.find(',', pos);
        if (comma == std::string::npos) comma = part.size();
        uint32_t e = uint32_t(std::stoul(part.substr(pos, comma - pos)));
        uint64_t q = 1;
        for (uint32_t i = 0; i < e; i++) q *= p;
        if (!out.empty()) out += " \xe2\x8a\x95 ";
        out += "Z/" + std::to_string(q);
        pos = comma + 1;
    }
    return out;
}

std::string render_csv(const njson& report) {
    std::string s = "partition,count,empirical,theory,theory_limit,z\n";
    const njson& res = report.at("results");
    auto opt = [](const njson& row, const char* key) {
        return row.contains(key) ? std::to_string(row.at(key).get<double>()) : std::string();
    };
    for (const njson& row : res.at("classes")) {
        s += "\"" + row.at("partition").get<std::string>() + "\",";
        s += std::to_string(row.at("count").get<uint64_t>()) + ",";
        s += std::to_string(row.at("empirical").get<double>()) + ",";
        s += opt(row, "theory") + "," + opt(row, "theory_limit") + ",";
        s += std::to_string(row.at("z").get<double>()) + "\n";
    }
    if (res.contains("tail")) {
        const njson& t = res.at("tail");
        s += "\"<tail>\"," + std::to_string(t.at("count").get<uint64_t>()) + "," +
             std::to_string(t.at("empirical").get<double>()) + "," +
             std::to_string(t.at("theory").get<double>()) + ",,\n";
    }
    return s;
}

std::string render_pretty(const njson& report) {
    const njson& cfg = report.at("config");
    const njson& res = report.at("results");
    uint64_t p = cfg.at("p").get<uint64_t>();
    std::string s;
    s += "kind=" + cfg.at("kind").get<std::string>() + " p=" + std::to_string(p) +
         " n=" + std::to_string(cfg.at("n").get<uint64_t>()) +
         " E=" + std::to_string(cfg.at("E").get<uint64_t>()) +
         " trials=" + std::to_string(cfg.at("trials").get<uint64_t>()) +
         " seed=" + std::to_string(report.at("seed").get<uint64_t>()) + "\n";
    s += "resolved=" + std::to_string(res.at("resolved").get<uint64_t>()) +
         " unresolved=" + std::to_string(res.at("unresolved").get<uint64_t>()) +
         " escalations=" + std::to_string(res.at("escalations").get<uint64_t>()) + "\n";
    std::string kind = cfg.at("kind").get<std::string>();
    bool partition_kind = kind == "coker" || kind == "stratum" || kind == "rst";
    for (const njson& row : res.at("classes")) {
        std::string label = row.at("partition").get<std::string>();
        if (partition_kind) label = pretty_partition(label, p);
        s += "  " + label + ": count=" + std::to_string(row.at("count").get<uint64_t>()) +
             " empirical=" + std::to_string(row.at("empirical").get<double>());
        if (row.contains("theory"))
            s += " theory=" + std::to_string(row.at("theory").get<double>());
        if (row.contains("theory_limit"))
            s += " limit=" + std::to_string(row.at("theory_limit").get<double>());
        s += " z=" + std::to_string(row.at("z").get<double>()) + "\n";
    }
    if (res.contains("tail"))
        s += "  <tail>: count=" + std::to_string(res.at("tail").at("count").get<uint64_t>()) +
             " empirical=" + std::to_string(res.at("tail").at("empirical").get<double>()) +
             " theory=" + std::to_string(res.at("tail").at("theory").get<double>()) + "\n";
    if (res.contains("chi_square"))
        s += "chi_square: stat=" +
             std::to_string(res.at("chi_square").at("stat").get<double>()) +
             " dof=" + std::to_string(res.at("chi_square").at("dof").get<uint64_t>()) +
             " p_value=" + std::to_string(res.at("chi_square").at("p_value").get<double>()) +
             "\n";
    if (res.contains("tv_distance"))
        s += "tv_distance=" + std::to_string(res.at("tv_distance").get<double>()) + "\n";
    if (res.contains("extras"))
        for (auto& [k, v] : res.at("extras").items())
            s += k + "=" + std::to_string(v.get<double>()) + "\n";
    if (res.contains("series"))
        for (const njson& row : res.at("series")) {
            s += "series:";
            for (auto& [k, v] : row.items()) s += " " + k + "=" + std::to_string(v.get<double>());
            s += "\n";
        }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"isoclass: statistics of random symplectic p-group models"};
    app.require_subcommand(1);

    Session session(isx_session_new());
    if (!session) {
        std::cerr << "error: cannot create session\n";
        return 3;
    }

    std::string format = "json", out_path, config_path;

    // ---- run
    auto* run = app.add_subcommand("run", "run a Monte Carlo experiment");
    std::string kind;
    uint64_t p = 2, trials = 10000, seed = 0;
    uint32_t E = 8, E_cap = 0, n = 0, m = 1, sexp = 1, e = 1, threads = 0;
    int32_t r = -1;
    std::vector<uint32_t> e_list, n_list;
    std::vector<uint64_t> primes;
    run->add_option("--config", config_path, "flat JSON config file; flags override");
    auto* okind = run->add_option("--kind", kind,
                                  "coker|stratum|rst|moment|igusa|pairing_match|"
                                  "global_sha|kernel_dim|uniformity");
    auto* op = run->add_option("--p", p, "prime");
    auto* oE = run->add_option("--E", E, "working precision");
    auto* oEcap = run->add_option("--E-cap", E_cap, "escalation cap (0 = 8*E)");
    auto* on = run->add_option("--n", n, "size (half-rank for rst)");
    auto* orr = run->add_option("--r", r, "corank / conditioning (-1 = none)");
    auto* om = run->add_option("--m", m, "moment order");
    auto* os = run->add_option("--s", sexp, "determinant exponent (igusa)");
    auto* oe = run->add_option("--e", e, "level: q = p^e (moment)");
    auto* oel = run->add_option("--e-list", e_list, "standard-form half exponents");
    auto* opr = run->add_option("--primes", primes, "primes (global_sha)");
    auto* onl = run->add_option("--n-list", n_list, "sweep over n");
    auto* ot = run->add_option("--trials", trials, "trial count");
    auto* osd = run->add_option("--seed", seed, "master seed");
    auto* oth = run->add_option("--threads", threads, "worker threads (0 = auto)");
    run->add_option("--format", format, "json|csv|pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    run->add_option("--out", out_path, "output path (default stdout)");

    // ---- theory
    auto* theory = app.add_subcommand("theory", "evaluate a closed-form quantity");
    std::string top, G_text;
    uint64_t tp = 2;
    uint32_t tn = 0, tr = 0, tm = 0, ts = 0, te = 1, tk = 0;
    double tol = 1e-12;
    std::vector<uint32_t> te_list;
    theory->add_option("op", top,
                       "gl_alt_ratio|euler_alt|sp_order|w_weight|w_sum|pi_finite|"
                       "pi_limit|stratum_finite|igusa|ogr_count|moment_finite|"
                       "moment_limit|count_injections|prob_same_pairing|"
                       "prob_nonzero_t|schubert_dim|stratum_dim")
        ->required();
    theory->add_option("--p", tp, "prime");
    theory->add_option("--G", G_text, "partition, e.g. \"2,1,1\" (empty = trivial)");
    auto* tno = theory->add_option("--n", tn, "n");
    auto* tro = theory->add_option("--r", tr, "r");
    auto* tmo = theory->add_option("--m", tm, "m");
    auto* tso = theory->add_option("--s", ts, "s");
    theory->add_option("--e", te, "level exponent: q = p^e");
    auto* tko = theory->add_option("--k", tk, "k");
    theory->add_option("--tol", tol, "tail tolerance");
    auto* tel = theory->add_option("--e-list", te_list, "standard-form half exponents");
    theory->add_option("--format", format, "json|pretty");
    theory->add_option("--out", out_path, "output path");

    // ---- selftest
    auto* selftest = app.add_subcommand("selftest", "run the exact enumeration checks");
    selftest->add_option("--format", format, "json|pretty");
    selftest->add_option("--out", out_path, "output path");

    // ---- enumerate
    auto* enumerate = app.add_subcommand("enumerate", "list maximal isotropic summands");
    uint32_t en = 1, ee = 1;
    uint64_t ep = 2;
    bool list = false;
    enumerate->add_option("--n", en, "half-rank")->required();
    enumerate->add_option("--p", ep, "prime");
    enumerate->add_option("--e", ee, "level exponent: q = p^e");
    enumerate->add_flag("--list", list, "include the summand bases");
    enumerate->add_option("--out", out_path, "output path");

    // ---- cache
    auto* cache = app.add_subcommand("cache", "inspect the sp-order cache");
    bool clear = false;
    cache->add_flag("--clear", clear, "remove the cache file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int rc = app.exit(err);
        return rc == 0 ? 0 : 2;
    }

    auto finish = [&](int status, char* text) -> int {
        CStr guard(text);
        if (status != ISX_OK && !text) {
            std::cerr << "error: " << isx_last_error(session.get()) << "\n";
            return exit_code_for(status);
        }
        std::string body = text ? text : "";
        if (format == "csv")
            body = render_csv(njson::parse(body));
        else if (format == "pretty" && !body.empty() && body[0] == '{') {
            njson j = njson::parse(body);
            body = j.contains("results") ? render_pretty(j) : j.dump(2) + "\n";
        }
        write_output(body, out_path);
        if (status != ISX_OK)
            std::cerr << "error: " << isx_last_error(session.get()) << "\n";
        return exit_code_for(status);
    };

    if (run->parsed()) {
        njson cfg = njson::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) {
                std::cerr << "error: cannot read " << config_path << "\n";
                return 2;
            }
            try {
                f >> cfg;
            } catch (const std::exception& ex) {
                std::cerr << "error: bad config file: " << ex.what() << "\n";
                return 2;
            }
        }
        if (okind->count()) cfg["kind"] = kind;
        if (op->count()) cfg["p"] = p;
        if (oE->count()) cfg["E"] = E;
        if (oEcap->count()) cfg["E_cap"] = E_cap;
        if (on->count()) cfg["n"] = n;
        if (orr->count()) cfg["r"] = r;
        if (om->count()) cfg["m"] = m;
        if (os->count()) cfg["s"] = sexp;
        if (oe->count()) cfg["e"] = e;
        if (oel->count()) cfg["e_list"] = e_list;
        if (opr->count()) cfg["primes"] = primes;
        if (onl->count()) cfg["n_list"] = n_list;
        if (ot->count()) cfg["trials"] = trials;
        if (osd->count()) cfg["seed"] = seed;
        if (oth->count()) cfg["threads"] = threads;
        char* text = nullptr;
        int status = isx_run(session.get(), cfg.dump().c_str(), &text);
        return finish(status, text);
    }

    if (theory->parsed()) {
        for (auto& ch : top)
            if (ch == '-') ch = '_'; // accept pi-limit as well as pi_limit
        njson q;
        q["op"] = top;
        q["p"] = tp;
        if (!G_text.empty() || top == "sp_order" || top == "w_weight" ||
            top == "pi_finite" || top == "pi_limit" || top == "stratum_finite" ||
            top == "count_injections")
            q["G"] = G_text;
        if (tno->count()) q["n"] = tn;
        if (tro->count()) q["r"] = tr;
        if (tmo->count()) q["m"] = tm;
        if (tso->count()) q["s"] = ts;
        q["e"] = te;
        if (tko->count()) q["k"] = tk;
        q["tol"] = tol;
        if (tel->count()) q["e_list"] = te_list;
        char* text = nullptr;
        int status = isx_theory(session.get(), q.dump().c_str(), &text);
        return finish(status, text);
    }

    if (selftest->parsed()) {
        char* text = nullptr;
        int status = isx_selftest(session.get(), &text);
        return finish(status, text);
    }

    if (enumerate->parsed()) {
        char* text = nullptr;
        int status = isx_enumerate_ogr(session.get(), en, ep, ee, list ? 1 : 0, &text);
        return finish(status, text);
    }

    if (cache->parsed()) {
        if (clear) {
            if (isx_cache_clear(session.get()) != ISX_OK) {
                std::cerr << "error: " << isx_last_error(session.get()) << "\n";
                return 3;
            }
            std::cout << "cache cleared\n";
            return 0;
        }
        const char* path = isx_session_cache_path(session.get());
        std::cout << "cache path: " << (path && *path ? path : "(disabled)") << "\n";
        return 0;
    }

    return 2;
}
