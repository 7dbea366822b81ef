#include "../include/isoclass.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "experiments.hpp"
#include "quad.hpp"
#include "selftest.hpp"

using namespace isoclass;
using njson = nlohmann::json;

struct isx_session {
    SpOrderCache cache;
    std::string cache_path;
    std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int map_error(isx_session* s, const error& e) {
    if (s) s->last_error = e.what();
    switch (e.code()) {
        case errc::invalid_argument:
        case errc::theory_unavailable:
        case errc::not_in_span:
        case errc::degenerate_buckets: return ISX_ERR_USAGE;
        case errc::too_large: return ISX_ERR_TOO_LARGE;
        case errc::unresolved_precision: return ISX_ERR_PRECISION;
        case errc::singular_matrix: return ISX_ERR_SINGULAR;
        case errc::internal: return ISX_ERR_INTERNAL;
    }
    return ISX_ERR_INTERNAL;
}

template <class Fn>
int guarded(isx_session* s, Fn&& fn) {
    if (!s) return ISX_ERR_USAGE;
    try {
        s->last_error.clear();
        return fn();
    } catch (const error& e) {
        return map_error(s, e);
    } catch (const std::exception& e) {
        s->last_error = e.what();
        return ISX_ERR_INTERNAL;
    }
}

njson theory_eval(isx_session* s, const njson& q) {
    std::string op = q.at("op").get<std::string>();
    auto partition_arg = [&](const char* key) {
        return q.contains(key) ? Partition::parse(q.at(key).get<std::string>())
                               : Partition{};
    };
    uint64_t p = q.value("p", 2ull);
    njson out;
    out["op"] = op;
    auto put_rat = [&](const BigRat& r) {
        out["rational"] = BigRat(r).str();
        out["value"] = to_double(r);
    };
    if (op == "gl_alt_ratio") {
        put_rat(gl_alt_ratio(q.at("m").get<uint32_t>(), p));
    } else if (op == "euler_alt") {
        EulerAlt e = euler_alt(q.at("r").get<uint32_t>(), p, q.value("tol", 1e-12));
        out["value"] = e.value;
        out["tail"] = e.tail;
    } else if (op == "sp_order") {
        SymplecticType G{p, partition_arg("G")};
        out["integer"] = s->cache.sp_order(G).str();
    } else if (op == "w_weight") {
        put_rat(w_weight({p, partition_arg("G")}, s->cache));
    } else if (op == "w_sum") {
        put_rat(w_sum_exact(p, q.at("k").get<uint32_t>()));
    } else if (op == "pi_finite") {
        put_rat(pi_finite({p, partition_arg("G")}, q.at("n").get<uint32_t>(), s->cache));
    } else if (op == "pi_limit") {
        ApproxProb a = pi_limit({p, partition_arg("G")}, q.at("r").get<uint32_t>(), s->cache);
        out["value"] = a.value;
        out["tail"] = a.tail;
    } else if (op == "stratum_finite") {
        put_rat(stratum_finite({p, partition_arg("G")}, q.at("n").get<uint32_t>(),
                               q.at("r").get<uint32_t>(), s->cache));
    } else if (op == "igusa") {
        put_rat(igusa(q.at("n").get<uint32_t>(), q.at("s").get<uint32_t>(), p));
    } else if (op == "ogr_count") {
        out["integer"] = ogr_count(q.at("n").get<uint32_t>(), p, q.value("e", 1u)).str();
    } else if (op == "moment_finite") {
        put_rat(moment_finite(q.at("m").get<uint32_t>(), q.at("n").get<uint32_t>(), p,
                              q.value("e", 1u)));
    } else if (op == "moment_limit") {
        out["integer"] = moment_limit(q.at("m").get<uint32_t>(), p, q.value("e", 1u)).str();
    } else if (op == "count_injections") {
        out["integer"] =
            count_injections(partition_arg("G"), q.at("m").get<uint32_t>(), p,
                             q.value("e", 1u))
                .str();
    } else if (op == "prob_same_pairing") {
        std::vector<uint32_t> e_list = q.at("e_list").get<std::vector<uint32_t>>();
        put_rat(prob_same_pairing(e_list, 2 * uint32_t(e_list.size()), p));
    } else if (op == "prob_nonzero_t") {
        ApproxProb a = prob_nonzero_T(q.at("r").get<uint32_t>(), p);
        out["value"] = a.value;
        out["tail"] = a.tail;
    } else if (op == "schubert_dim") {
        out["integer"] =
            std::to_string(schubert_dim(q.at("n").get<int64_t>(), q.at("r").get<int64_t>()));
    } else if (op == "stratum_dim") {
        out["integer"] =
            std::to_string(stratum_dim(q.at("n").get<int64_t>(), q.at("r").get<int64_t>()));
    } else {
        fail(errc::invalid_argument, "theory: unknown op '" + op + "'");
    }
    return out;
}

} // namespace

extern "C" {

const char* isx_version(void) { return "0.1.0"; }

isx_session* isx_session_new(void) {
    auto* s = new (std::nothrow) isx_session;
    if (!s) return nullptr;
    if (const char* env = std::getenv("ISOCLASS_CACHE")) {
        s->cache_path = env;
        s->cache.set_cache_path(s->cache_path);
    }
    return s;
}

void isx_session_free(isx_session* s) { delete s; }

const char* isx_last_error(const isx_session* s) {
    return s ? s->last_error.c_str() : "null session";
}

int isx_session_set_cache_path(isx_session* s, const char* path) {
    return guarded(s, [&]() {
        s->cache_path = path ? path : "";
        s->cache.set_cache_path(s->cache_path);
        return ISX_OK;
    });
}

const char* isx_session_cache_path(const isx_session* s) {
    return s ? s->cache_path.c_str() : "";
}

int isx_cache_clear(isx_session* s) {
    return guarded(s, [&]() {
        s->cache.clear();
        return ISX_OK;
    });
}

int isx_run(isx_session* s, const char* config_json, char** report_json) {
    return guarded(s, [&]() {
        if (!config_json || !report_json) {
            s->last_error = "null argument";
            return int(ISX_ERR_USAGE);
        }
        ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
        RunResult r = run_experiment(cfg, s->cache);
        *report_json = dup_string(r.to_json());
        return int(ISX_OK);
    });
}

int isx_theory(isx_session* s, const char* query_json, char** result_json) {
    return guarded(s, [&]() {
        if (!query_json || !result_json) {
            s->last_error = "null argument";
            return int(ISX_ERR_USAGE);
        }
        njson q;
        try {
            q = njson::parse(query_json);
        } catch (const std::exception& e) {
            s->last_error = std::string("theory: bad JSON: ") + e.what();
            return int(ISX_ERR_USAGE);
        }
        try {
            *result_json = dup_string(theory_eval(s, q).dump(2) + "\n");
        } catch (const njson::exception& e) {
            s->last_error = std::string("theory: ") + e.what();
            return int(ISX_ERR_USAGE);
        }
        return int(ISX_OK);
    });
}

int isx_selftest(isx_session* s, char** report_json) {
    return guarded(s, [&]() {
        SelftestResult r = run_selftest(s->cache);
        if (report_json) *report_json = dup_string(r.report_json);
        return int(r.all_pass ? ISX_OK : ISX_ERR_STAT_TEST);
    });
}

int isx_enumerate_ogr(isx_session* s, uint32_t n, uint64_t p, uint32_t e,
                      int include_list, char** report_json) {
    return guarded(s, [&]() {
        if (!report_json) {
            s->last_error = "null argument";
            return int(ISX_ERR_USAGE);
        }
        auto all = enumerate_ogr(n, p, e);
        njson j;
        j["n"] = n;
        j["p"] = p;
        j["e"] = e;
        j["count"] = all.size();
        j["formula"] = ogr_count(n, p, e).str();
        if (include_list) {
            njson list = njson::array();
            for (const auto& z : all) {
                njson cols = njson::array();
                for (size_t c = 0; c < z.basis().cols(); c++) {
                    njson col = njson::array();
                    for (size_t r2 = 0; r2 < z.basis().rows(); r2++)
                        col.push_back(z.basis().at(r2, c));
                    cols.push_back(col);
                }
                list.push_back(cols);
            }
            j["summands"] = list;
        }
        *report_json = dup_string(j.dump(2) + "\n");
        return int(ISX_OK);
    });
}

void isx_free(char* s) { std::free(s); }

} // extern "C"
