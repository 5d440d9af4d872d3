#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nzam/harness.hpp"

using namespace nzam;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("nzam_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json small_config() {
    return json::parse(R"({
        "chain": {"model": "tfim", "n_env": 2},
        "initial_state": {"kind": "boundary-bell"},
        "integrator": {"h": 0.01, "t_max": 0.2, "memory": "ode"},
        "bss": {"restarts": 2}
    })");
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nzam");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const json& j) {
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

} // namespace

TEST_CASE("validation names the offending field") {
    auto bad = small_config();
    bad["integrator"]["h"] = -0.1;
    try {
        parse_scenario(bad);
        FAIL("accepted a negative step");
    } catch (const ValidationError& e) {
        CHECK(e.field == "integrator.h");
    }
    auto typo = small_config();
    typo["chain"]["n_evn"] = 3;
    CHECK_THROWS_WITH_AS(parse_scenario(typo), doctest::Contains("chain.n_evn"), ValidationError);
    auto section = small_config();
    section["integrater"] = json::object();
    CHECK_THROWS_AS(parse_scenario(section), ValidationError);
    auto kind = small_config();
    kind["initial_state"]["kind"] = "bell";
    CHECK_THROWS_AS(parse_scenario(kind), ValidationError);
}

TEST_CASE("normalized config round-trips and hashes deterministically") {
    const auto s = parse_scenario(small_config());
    const auto again = parse_scenario(s.to_json());
    CHECK(s.hash() == again.hash());
    CHECK(s.hash().size() == 16);
    auto other = small_config();
    other["bss"]["seed"] = 9;
    CHECK(parse_scenario(other).hash() != s.hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("a product scenario has no inhomogeneous term") {
    auto cfg = small_config();
    cfg["initial_state"]["kind"] = "product";
    cfg["initial_state"]["seed"] = 4;
    const auto r = run_scenario(parse_scenario(cfg), {});
    CHECK(r.summary["checks"]["inhom_within_separability_tol"]["pass"].get<bool>());
    CHECK(r.summary["inhom_max"].get<double>() < 1e-10);
}

TEST_CASE("run writes every file and repeats bit for bit") {
    const auto dir = scratch("run");
    const auto cfg = write_config(dir, small_config());
    CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "a").string()}) == kExitOk);
    CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "b").string()}) == kExitOk);
    for (const char* f : {"trajectory.csv", "decomposition.csv", "bounds.json", "summary.json"}) {
        CHECK(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto hash = parse_scenario(small_config()).hash();
    std::ifstream dec(dir / "a" / "decomposition.csv");
    std::string line;
    std::getline(dec, line);
    CHECK(line == "t,drive_norm,inhom_norm,memory_norm,closure_residual,bound_measured_mode,bound_analytic_mode,scenario_hash");
    int rows = 0;
    while (std::getline(dec, line)) {
        ++rows;
        CHECK(line.substr(line.rfind(',') + 1) == hash);
    }
    CHECK(rows == 21);
    const auto summary = json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary["checks"]["bound_domination"]["pass"].get<bool>());
    CHECK(summary["checks"]["closure"]["pass"].get<bool>());
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    auto bad = small_config();
    bad["integrator"]["h"] = -1.0;
    CHECK(cli({"run", "--config", write_config(dir, bad).string(), "--out", dir.string()}) == kExitValidation);
    CHECK(json::parse(slurp(dir / "error.json"))["error"]["field"] == "integrator.h");

    auto big = small_config();
    big["chain"]["n_env"] = 6;
    big["integrator"]["memory"] = "quadrature";
    CHECK(cli({"run", "--config", write_config(dir, big).string(), "--out", dir.string()}) == kExitInfeasible);

    CHECK(cli({"run", "--config", (dir / "missing.json").string()}) == kExitValidation);
    CHECK(cli({"run"}) == kExitValidation);
    CHECK(cli({"frobnicate"}) == kExitValidation);
}

TEST_CASE("sweeps") {
    const auto dir = scratch("sweep");
    auto cfg = small_config();
    cfg["integrator"]["memory"] = "none";
    cfg["outputs"] = {{"trajectory", false}};
    cfg["sweep"] = {{"axis", "chain.n_env"}, {"values", json::array({2, 3, 40})}};
    CHECK(cli({"sweep", "--config", write_config(dir, cfg).string(), "--out", dir.string(), "--threads", "2"}) ==
          kExitRuntime);
    std::ifstream agg(dir / "aggregate.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(agg, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[1].rfind("0,2,0,", 0) == 0);
    CHECK(lines[3].rfind("2,40,2,", 0) == 0);
    CHECK(fs::exists(dir / "002" / "error.json"));

    const auto empty = scratch("sweep_empty");
    cfg["sweep"]["values"] = json::array();
    CHECK(cli({"sweep", "--config", write_config(empty, cfg).string(), "--out", empty.string()}) == kExitOk);
    CHECK(slurp(empty / "aggregate.csv").find('\n') == slurp(empty / "aggregate.csv").size() - 1);

    cfg["sweep"]["axis"] = "chain.length";
    CHECK(cli({"sweep", "--config", write_config(empty, cfg).string(), "--out", empty.string()}) == kExitValidation);
}

TEST_CASE("bounds and enumerate subcommands") {
    const auto dir = scratch("bounds");
    const json b = {{"bounds", {{"mode", "higher_d"}, {"x", {0.01, 0.02}}, {"L_env", {50, 100}}, {"J", 1.0}}}};
    CHECK(cli({"bounds", "--config", write_config(dir, b).string(), "--out", dir.string()}) == kExitOk);
    CHECK(json::parse(slurp(dir / "bounds.json"))["reports"].size() == 4);
    const json e = {{"enumerate", {{"k_max", 6}, {"i_max", 4}, {"stirling_max", 6}}}};
    CHECK(cli({"enumerate", "--config", write_config(dir, e).string(), "--out", dir.string()}) == kExitOk);
    CHECK(fs::exists(dir / "animals.csv"));
    const json m = {{"bounds", {{"mode", "measured"}}}};
    CHECK(cli({"bounds", "--config", write_config(dir, m).string(), "--out", dir.string()}) == kExitValidation);
}
