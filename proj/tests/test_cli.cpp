#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hms/io.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(HMS_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("field: reports eps for d=2, omega kind for d=5, errors for bad d") {
    auto r = run("field -d 2");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["eps"]["a"] == "3");
    CHECK(j["eps"]["b"] == "2");
    CHECK(j["fundamental_unit_norm"] == "-1");

    auto r5 = run("field -d 5");
    CHECK(r5.exit_code == 0);
    CHECK(json::parse(r5.out)["omega"] == "(1+sqrt d)/2");

    CHECK(run("field -d 4").exit_code == 2);
    CHECK(run("field -d 1").exit_code == 2);
}

TEST_CASE("shuffle subcommand counts") {
    auto r = run("shuffle -i 2 -j 2");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["count"] == 6);
    CHECK(j["shuffles"].size() == 6);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("verify").exit_code == 2);           // missing suite
    CHECK(run("verify nosuchsuite").exit_code == 2);
    CHECK(run("field --nodes 2").exit_code == 2);  // out of documented range
}

TEST_CASE("diangle subcommand matches the closed form") {
    auto r = run("diangle --d 2 --u eps --alpha 1,0 --nodes 32");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["relative_gap"].get<double>() < 1e-9);
    CHECK(j.contains("runtime_ms"));
}

TEST_CASE("zeta and lvalue emit records with tail bounds") {
    auto r = run("zeta --d 2 --k 2 --bound 30");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["value"].get<double>() > 1.0);
    CHECK(j["tail_bound"].get<double>() > 0.0);
    CHECK(j["mode"] == "series");

    auto r2 = run("lvalue --m 2 --n 1 --mode both --orbit 3 --nodes 16");
    CHECK(r2.exit_code == 0);
    json j2 = json::parse(r2.out);
    CHECK(j2["relative_gap"].get<double>() < 1e-2);
}

TEST_CASE("symbol subcommand produces a series with constant term 1") {
    auto r = run("symbol --d 2 --p1 0 --p2 inf --p3 1 "
                 "--gamma \"(3,2),(0,0),(0,0),(1,0)\" --depth 1 --nodes 20");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["c1"]["degree"] == 1);
    bool has_const = false;
    for (const auto& t : j["c1"]["terms"])
        if (t["x"].empty() && t["re"] == 1.0) has_const = true;
    CHECK(has_const);

    // identity gamma: degenerate diangle, series is exactly 1
    auto rid = run("symbol --d 2 --p1 0 --p2 inf --p3 1 "
                   "--gamma \"(1,0),(0,0),(0,0),(1,0)\" --depth 2 --nodes 16");
    json jid = json::parse(rid.out);
    CHECK(jid["c1"]["terms"].size() == 1);
}

TEST_CASE("form files round-trip and reject bad exponents") {
    auto F = hms::FieldContext::make(2);
    hms::ExpForm2 f(F);
    f.add_term(hms::Complex(0.5, -1.0), hms::QuadInt(3, 2));
    f.add_term(hms::Complex(1.0, 0.0), hms::QuadInt(1, 0));
    json j = hms::form_to_json(f);
    hms::ExpForm2 g = hms::form_from_json(j, F);
    REQUIRE(g.terms().size() == 2);
    CHECK(g.terms()[0].alpha == hms::QuadInt(3, 2));
    CHECK(g.terms()[0].coeff == hms::Complex(0.5, -1.0));

    json bad = {{"d", 2}, {"terms", {{{"re", 1.0}, {"im", 0.0}, {"a", 1}, {"b", 1}}}}};
    CHECK_THROWS_AS(hms::form_from_json(bad, F), std::invalid_argument);
    json wrongfield = {{"d", 5}, {"terms", json::array()}};
    CHECK_THROWS_AS(hms::form_from_json(wrongfield, F), std::invalid_argument);

    std::ofstream("/tmp/hms_form.json") << j.dump();
    auto r = run("membrane --d 2 --depth 1 --nodes 16 --forms /tmp/hms_form.json");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out)["Jb"]["degree"] == 1);
}

TEST_CASE("series JSON round-trip") {
    hms::NCSeries s(2);
    s.add_term(hms::NCMonomial{}, hms::Complex(1, 0));
    s.add_term(hms::NCMonomial{{1, 2}, {2, 1}}, hms::Complex(0.25, -0.5));
    auto j = hms::series_to_json(s);
    auto t = hms::series_from_json(j);
    CHECK(t.coefficient(hms::NCMonomial{{1, 2}, {2, 1}}) == hms::Complex(0.25, -0.5));
    CHECK(t.truncation_degree() == 2);
}

TEST_CASE("verify chen: exit code 0 and deterministic output files") {
    auto r1 = run("verify chen --seed 99 --nodes 20 -o /tmp/hms_v1.json");
    CHECK(r1.exit_code == 0);
    auto r2 = run("verify chen --seed 99 --nodes 20 -o /tmp/hms_v2.json");
    CHECK(r2.exit_code == 0);
    std::string a = slurp("/tmp/hms_v1.json"), b = slurp("/tmp/hms_v2.json");
    CHECK(!a.empty());
    CHECK(a == b);
    json j = json::parse(a);
    CHECK(j["all_pass"] == true);
    CHECK(j["checks"].size() > 0);

    // impossible tolerances force a verification failure: exit code 1
    auto rf = run("verify chen --seed 99 --nodes 20 --tolerance-scale 1e-30");
    CHECK(rf.exit_code == 1);
}

TEST_CASE("verify csv projection") {
    auto r = run("verify chen --seed 7 --nodes 20 --format csv -o /tmp/hms_v.csv");
    CHECK(r.exit_code == 0);
    std::string csv = slurp("/tmp/hms_v.csv");
    CHECK(csv.rfind("check,suite,residual,tolerance,pass", 0) == 0);
    CHECK(csv.find(",chen,") != std::string::npos);
    CHECK(csv.find(",true") != std::string::npos);
}

TEST_CASE("config file supplies defaults") {
    std::ofstream("/tmp/hms_cfg.json") << R"({"d": 5, "nodes": 20})";
    auto r = run("field --config /tmp/hms_cfg.json");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out)["omega"] == "(1+sqrt d)/2");
}
