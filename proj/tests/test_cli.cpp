#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace bpb::cli;
using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string column(const std::vector<std::vector<std::string>>& t, std::size_t row, const std::string& name) {
    for (std::size_t i = 0; i < t[0].size(); ++i)
        if (t[0][i] == name) return t[row][i];
    FAIL("missing column " << name);
    return "";
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("space show") {
    const Run r = call({"space", "show", "hex:0.5"});
    REQUIRE(r.code == kPass);
    const json j = json::parse(r.out);
    CHECK(j["dim"] == 2);
    REQUIRE(j["extreme_points"].size() == 6);
    bool has_11 = false;
    for (const auto& v : j["extreme_points"])
        has_11 = has_11 || (std::abs(v[0].get<double>() - 1) < 1e-12 && std::abs(v[1].get<double>() - 1) < 1e-12);
    CHECK(has_11);
    CHECK(j["dual_vertices"].size() == 6);
    CHECK(j["beta"]["rho"] == 0.5);

    CHECK(json::parse(call({"space", "show", "l1:2"}).out)["extreme_points"].size() == 4);
    const json z = json::parse(call({"space", "show", "z:10:0.5"}).out);
    CHECK(z["dim"] == 10);
    CHECK(z["norming_family"].size() == 11);
    CHECK(z["extreme_points"].is_null());

    const Run bad = call({"space", "show", "hex:0.3"});
    CHECK(bad.code == kUsage);
    CHECK(bad.err.find("rho") != std::string::npos);
    CHECK(call({"space", "show", "nosuch:2"}).code == kUsage);
    CHECK(call({"space"}).code == kUsage);
}

TEST_CASE("space from a JSON file") {
    const auto path = std::filesystem::temp_directory_path() / "bpb_cli_square.json";
    std::ofstream(path) << R"({"name": "square", "dim": 2, "functionals": [[1, 0], [0, 1]]})";
    const Run r = call({"space", "show", "@" + path.string()});
    REQUIRE(r.code == kPass);
    CHECK(json::parse(r.out)["extreme_points"].size() == 4);
    CHECK(call({"beta", "verify", "@" + path.string()}).code == kUsage);
    std::filesystem::remove(path);
    CHECK(call({"space", "show", "@/nonexistent/space.json"}).code == kUsage);
}

TEST_CASE("beta verify") {
    const Run h = call({"beta", "verify", "hex:0.75"});
    CHECK(h.code == kPass);
    CHECK(json::parse(h.out)["minimal_rho"].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(call({"beta", "verify", "z:5:0.4"}).code == kPass);
    const Run l = call({"beta", "verify", "linf:3"});
    CHECK(l.code == kPass);
    CHECK(json::parse(l.out)["minimal_rho"] == 0.0);
}

TEST_CASE("modulus examples") {
    const Run op = call({"modulus", "operator", "l1:2", "linf:2", "0.25", "--bounds", "thm_beta0_exact"});
    REQUIRE(op.code == kPass);
    auto t = parse_csv(op.out);
    REQUIRE(t.size() == 2);
    const std::vector<std::string> head = {"epsilon",    "kind",       "lo",        "hi",
                                           "outer_mesh", "inner_mesh", "certified", "thm_beta0_exact"};
    CHECK(t[0] == head);
    CHECK(num(column(t, 1, "lo")) <= 0.70711);
    CHECK(num(column(t, 1, "hi")) >= 0.70710);
    CHECK(column(t, 1, "certified") == "true");
    CHECK(num(column(t, 1, "thm_beta0_exact")) == doctest::Approx(std::sqrt(0.5)));

    const Run md = call({"modulus", "modified", "l1:2", "r:1", "0.16", "--format", "json"});
    REQUIRE(md.code == kPass);
    const json m = json::parse(md.out);
    REQUIRE(m.size() == 1);
    CHECK(m[0]["lo"].get<double>() <= 0.4);
    CHECK(m[0]["hi"].get<double>() >= 0.4);
    CHECK(m[0]["kind"] == "modified-spherical");

    const Run fn = call({"modulus", "functional", "l1:2", "0.125"});
    REQUIRE(fn.code == kPass);
    t = parse_csv(fn.out);
    CHECK(num(column(t, 1, "lo")) <= 0.5);
    CHECK(num(column(t, 1, "hi")) >= 0.5);

    const Run many = call({"modulus", "functional", "linf:2", "0.02,0.08", "--no-spherical", "--outer-mesh", "0.02"});
    REQUIRE(many.code == kPass);
    t = parse_csv(many.out);
    REQUIRE(t.size() == 3);
    CHECK(column(t, 1, "kind") == "functional");
}

TEST_CASE("modulus exit codes") {
    CHECK(call({"modulus", "operator", "hex:0.75", "linf:2", "0.1"}).code == kUncertifiable);
    CHECK(call({"modulus", "modified", "hex:0.5", "r:1", "0.1"}).code == kUncertifiable);
    const Run h = call({"modulus", "operator", "hex:0.75", "linf:2", "0.1", "--allow-heuristic", "--samples", "30"});
    CHECK(h.code == kPass);
    CHECK(column(parse_csv(h.out), 1, "certified") == "false");
    CHECK(call({"modulus", "functional", "linf:4", "0.1"}).code == kUncertifiable);
    CHECK(call({"modulus", "sideways", "l1:2", "0.1"}).code == kUsage);
    CHECK(call({"modulus", "operator", "l1:2", "0.1"}).code == kUsage);
    CHECK(call({"modulus", "operator", "l1:2", "linf:2", "abc"}).code == kUsage);
    CHECK(call({"modulus", "operator", "l1:2", "linf:2", "1.5"}).code == kUsage);
    CHECK(call({"modulus", "operator", "l1:2", "linf:2", "0.1", "--bounds", "no_such_bound"}).code == kUsage);
    CHECK(call({"modulus", "functional", "l1:2", "0.1", "--format", "xml"}).code == kUsage);
}

TEST_CASE("reproduce examples") {
    const Run h = call({"reproduce", "thm-hexagon-lower", "--rho", "0.75", "--eps", "0.1"});
    CHECK(h.code == kPass);
    auto t = parse_csv(h.out);
    CHECK(num(column(t, 1, "lo")) >= 0.7546);
    CHECK(h.err.find("PASS lower bound reached") != std::string::npos);

    const Run nc = call({"reproduce", "noncontinuity", "--eps", "0.25", "--rhos", "0.6,0.75,0.9", "--bounds-only"});
    CHECK(nc.code == kPass);
    t = parse_csv(nc.out);
    REQUIRE(t.size() == 4);
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(num(column(t, i, "gap")) > 0.0);
        CHECK(column(t, i, "lo").empty());
    }

    const Run psi = call({"reproduce", "psi-construction", "--n", "20", "--rho", "0.5", "--eps", "0.05", "--format",
                          "json"});
    CHECK(psi.code == kPass);
    const json j = json::parse(psi.out);
    CHECK(j["pass"] == true);
    CHECK(j["rows"][0]["branch_residual"].get<double>() < 1e-9);
    CHECK(j["rows"][0]["in_pi_eps_spherical"] == true);

    // eps0 past the admissible limit leaves the pair outside the spherical set.
    const Run far = call({"reproduce", "psi-construction", "--n", "20", "--rho", "0.5", "--eps", "0.05", "--eps0",
                          "0.049"});
    CHECK(far.code == kAssertionFailed);
    CHECK(far.err.find("FAIL pair in spherical Pi_eps") != std::string::npos);

    CHECK(call({"reproduce", "no-such-experiment"}).code == kUsage);
    CHECK(call({"reproduce", "psi-construction", "--n", "1"}).code == kUsage);
}

TEST_CASE("reproduce writes CSV and JSON artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "bpb_cli_out";
    std::filesystem::remove_all(dir);
    const Run r = call({"reproduce", "modified-sharp", "--out", dir.string()});
    CHECK(r.code == kPass);
    REQUIRE(std::filesystem::exists(dir / "modified-sharp.csv"));
    REQUIRE(std::filesystem::exists(dir / "modified-sharp.json"));
    std::ifstream js(dir / "modified-sharp.json");
    const json j = json::parse(js);
    CHECK(j["experiment"] == "modified-sharp");
    CHECK(j["assertions"].size() == 6);
    for (const auto& a : j["assertions"]) CHECK(a["pass"] == true);
    std::ifstream cs(dir / "modified-sharp.csv");
    std::stringstream buf;
    buf << cs.rdbuf();
    const auto t = parse_csv(buf.str());
    REQUIRE(t.size() == 4);
    for (const char* c : {"epsilon", "kind", "lo", "hi", "outer_mesh", "inner_mesh", "certified", "modified_ell1R"})
        CHECK(std::find(t[0].begin(), t[0].end(), c) != t[0].end());
    std::filesystem::remove_all(dir);
}

TEST_CASE("every experiment runs and passes at small sizes") {
    ExperimentConfig cfg;
    cfg.instances = 40;
    cfg.spaces = 2;
    for (const std::string& name : experiment_names()) {
        CAPTURE(name);
        const ExperimentResult r = run_experiment(name, cfg);
        CHECK(r.name == name);
        CHECK_FALSE(r.assertions.empty());
        CHECK(r.pass());
        CHECK_FALSE(r.table.rows.empty());
        for (const char* c : {"epsilon", "lo", "hi", "certified"})
            CHECK(std::find(r.table.columns.begin(), r.table.columns.end(), c) != r.table.columns.end());
    }
}

TEST_CASE("output is deterministic for a fixed seed") {
    const std::vector<std::string> a = {"reproduce", "conjecture-scan", "--spaces", "3", "--eps", "0.1", "--seed", "7"};
    const Run r1 = call(a);
    const Run r2 = call(a);
    CHECK(r1.code == kPass);
    CHECK(r1.out == r2.out);
    CHECK(r1.err == r2.err);
    const Run other = call({"reproduce", "conjecture-scan", "--spaces", "3", "--eps", "0.1", "--seed", "8"});
    CHECK(other.out != r1.out);

    // BPB_SEED takes precedence over --seed.
    ::setenv("BPB_SEED", "8", 1);
    const Run env = call(a);
    ::unsetenv("BPB_SEED");
    CHECK(env.out == other.out);
    ::setenv("BPB_SEED", "-3", 1);
    CHECK(call(a).code == kUsage);
    ::unsetenv("BPB_SEED");
}

TEST_CASE("bound and list commands") {
    const Run b = call({"bound", "thm_hexagon_lower", "--rho", "0.75", "--eps", "0.1"});
    CHECK(b.code == kPass);
    const auto t = parse_csv(b.out);
    CHECK(num(column(t, 1, "value")) == doctest::Approx(std::sqrt(0.6)));
    CHECK(column(t, 1, "side") == "lower");
    CHECK(call({"bound", "thm_hexagon_lower", "--rho", "0.3", "--eps", "0.1"}).code == kUsage);
    const Run l = call({"list"});
    for (const std::string& n : experiment_names()) CHECK(l.out.find(n) != std::string::npos);
    CHECK(call({"--help"}).code == kPass);
    CHECK(call({}).code == kUsage);
}

TEST_CASE("CSV quoting and JSON cells") {
    Table t;
    t.columns = {"a", "b"};
    t.add({"x,y", "say \"hi\""});
    t.add({"1.5", ""});
    CHECK(t.to_csv() == "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n1.5,\r\n");
    const auto back = parse_csv(t.to_csv());
    CHECK(back[1][0] == "x,y");
    CHECK(back[1][1] == "say \"hi\"");
    const json j = t.to_json();
    CHECK(j[1]["a"] == 1.5);
    CHECK(j[1]["b"].is_null());
    CHECK_THROWS(t.add({"only one"}));
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(-0.0) == "0");
}
