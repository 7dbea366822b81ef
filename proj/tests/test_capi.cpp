#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "isoclass.h"

using njson = nlohmann::json;

namespace {

struct Session {
    isx_session* s;
    Session() : s(isx_session_new()) {}
    ~Session() { isx_session_free(s); }
};

std::string take(char* text) {
    std::string out = text ? text : "";
    isx_free(text);
    return out;
}

} // namespace

TEST_CASE("version and session lifecycle") {
    CHECK(std::strlen(isx_version()) > 0);
    Session ses;
    REQUIRE(ses.s != nullptr);
    CHECK(std::string(isx_last_error(ses.s)).empty());
}

TEST_CASE("theory evaluation through the C surface") {
    Session ses;
    char* text = nullptr;
    int rc = isx_theory(ses.s, R"({"op":"pi_finite","p":2,"n":4,"G":""})", &text);
    REQUIRE(rc == ISX_OK);
    njson j = njson::parse(take(text));
    CHECK(j.at("rational") == "7/16");

    rc = isx_theory(ses.s, R"({"op":"pi_limit","p":2,"r":0,"G":""})", &text);
    REQUIRE(rc == ISX_OK);
    j = njson::parse(take(text));
    CHECK(j.at("value").get<double>() == doctest::Approx(0.41942).epsilon(1e-4));
    CHECK(j.at("tail").get<double>() < 1e-9);

    rc = isx_theory(ses.s, R"({"op":"sp_order","p":2,"G":"1,1,1,1"})", &text);
    REQUIRE(rc == ISX_OK);
    j = njson::parse(take(text));
    CHECK(j.at("integer") == "720");
}

TEST_CASE("error reporting") {
    Session ses;
    char* text = nullptr;
    CHECK(isx_theory(ses.s, "{ not json", &text) == ISX_ERR_USAGE);
    CHECK(std::string(isx_last_error(ses.s)).size() > 0);
    CHECK(isx_theory(ses.s, R"({"op":"no_such_op"})", &text) == ISX_ERR_USAGE);
    CHECK(isx_run(ses.s, R"({"kind":"coker","n":3})", &text) == ISX_ERR_USAGE);
    CHECK(isx_theory(ses.s, R"({"op":"sp_order","p":2,"G":"30,30"})", &text) ==
          ISX_ERR_TOO_LARGE);
}

TEST_CASE("experiment run through the C surface is deterministic") {
    Session ses;
    const char* cfg =
        R"({"kind":"coker","p":2,"n":2,"E":6,"trials":3000,"seed":7,"threads":1})";
    char* t1 = nullptr;
    REQUIRE(isx_run(ses.s, cfg, &t1) == ISX_OK);
    std::string r1 = take(t1);
    const char* cfg8 =
        R"({"kind":"coker","p":2,"n":2,"E":6,"trials":3000,"seed":7,"threads":8})";
    char* t2 = nullptr;
    REQUIRE(isx_run(ses.s, cfg8, &t2) == ISX_OK);
    std::string r8 = take(t2);
    // thread count is echoed in the config but must not affect results
    njson j1 = njson::parse(r1), j8 = njson::parse(r8);
    CHECK(j1.at("results") == j8.at("results"));
    CHECK(j1.at("results").at("trials") == 3000);
}

TEST_CASE("enumeration through the C surface") {
    Session ses;
    char* text = nullptr;
    REQUIRE(isx_enumerate_ogr(ses.s, 2, 2, 1, 1, &text) == ISX_OK);
    njson j = njson::parse(take(text));
    CHECK(j.at("count") == 6);
    CHECK(j.at("formula") == "6");
    CHECK(j.at("summands").size() == 6);
}

TEST_CASE("selftest through the C surface") {
    Session ses;
    char* text = nullptr;
    int rc = isx_selftest(ses.s, &text);
    std::string report = take(text);
    CHECK(rc == ISX_OK);
    CHECK(njson::parse(report).at("all_pass") == true);
}

TEST_CASE("cache path control") {
    Session ses;
    CHECK(isx_session_set_cache_path(ses.s, "/tmp/isoclass_capi_cache.txt") == ISX_OK);
    CHECK(std::string(isx_session_cache_path(ses.s)) == "/tmp/isoclass_capi_cache.txt");
    char* text = nullptr;
    REQUIRE(isx_theory(ses.s, R"({"op":"w_weight","p":2,"G":"1,1"})", &text) == ISX_OK);
    CHECK(njson::parse(take(text)).at("rational") == "2/3");
    CHECK(isx_cache_clear(ses.s) == ISX_OK);
    CHECK(isx_session_set_cache_path(ses.s, nullptr) == ISX_OK);
}

TEST_CASE("cache path from the environment") {
    setenv("ISOCLASS_CACHE", "/tmp/isoclass_env_cache.txt", 1);
    isx_session* s = isx_session_new();
    REQUIRE(s != nullptr);
    CHECK(std::string(isx_session_cache_path(s)) == "/tmp/isoclass_env_cache.txt");
    char* text = nullptr;
    REQUIRE(isx_theory(s, R"({"op":"sp_order","p":2,"G":"2,2"})", &text) == ISX_OK);
    CHECK(njson::parse(take(text)).at("integer") == "48");
    std::ifstream f("/tmp/isoclass_env_cache.txt");
    std::string body((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(body.find("2:2,2=48") != std::string::npos);
    isx_cache_clear(s);
    isx_session_free(s);
    unsetenv("ISOCLASS_CACHE");
}
