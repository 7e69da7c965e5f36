// Drives the installed binary through std::system; locations arrive via the
// WORKPEN_CLI / WORKPEN_SCENARIOS environment variables.
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "workpen/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string require_env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr) throw std::runtime_error(std::string("missing env var ") + name);
    return v;
}

const fs::path& scratch() {
    static const fs::path p = [] {
        const fs::path q = fs::current_path() / "cli_e2e_scratch";
        fs::remove_all(q);
        fs::create_directories(q);
        return q;
    }();
    return p;
}

fs::path scenario(const std::string& name) {
    return fs::path(require_env("WORKPEN_SCENARIOS")) / name;
}

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_all(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary | std::ios::trunc) << content;
}

CliResult run_cli(const std::string& args, const fs::path& cwd = {}) {
    static int counter = 0;
    const fs::path out = scratch() / ("stdout." + std::to_string(counter));
    const fs::path err = scratch() / ("stderr." + std::to_string(counter));
    ++counter;
    std::string cmd;
    if (!cwd.empty()) cmd += "cd \"" + cwd.string() + "\" && ";
    cmd += "\"" + require_env("WORKPEN_CLI") + "\" " + args;
    cmd += " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, read_all(out), read_all(err)};
}

}  // namespace

TEST_CASE("run: static scenario reports an all-zero decomposition") {
    const CliResult r = run_cli("run \"" + scenario("static_equilibrium.json").string() + "\"");
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(r.out);
    CHECK(std::abs(rep["W"].get<double>()) <= 1e-12);
    CHECK(std::abs(rep["Sigma"].get<double>()) <= 1e-9);
    CHECK(std::abs(rep["identity_residual"].get<double>()) <= 1e-9);
    CHECK(rep["conventions"]["k_B"] == 1);
}

TEST_CASE("run: near-sudden quench matches the frozen-population closed forms") {
    const std::string args = "run \"" + scenario("sudden_quench.json").string() + "\"";
    const CliResult r1 = run_cli(args);
    REQUIRE(r1.exit_code == 0);
    const json rep = json::parse(r1.out);

    const double ln2 = std::log(2.0);
    CHECK(std::abs(rep["W"].get<double>() - 0.5 * ln2) <= 1e-4);
    CHECK(std::abs(rep["W_qs"].get<double>() - std::log(4.0 / 3.0)) <= 1e-9);
    CHECK(std::abs(rep["W_pn_direct"].get<double>() - 0.5 * std::log(9.0 / 8.0)) <= 1e-4);
    CHECK(rep["Sigma"].get<double>() >= -1e-8);
    CHECK(rep["Sigma"].get<double>() <= 1e-4);
    CHECK(std::abs(rep["identity_residual"].get<double>()) <= 1e-6);

    // Determinism: a second invocation reproduces the bytes.
    const CliResult r2 = run_cli(args);
    CHECK(r2.exit_code == 0);
    CHECK(r1.out == r2.out);
}

TEST_CASE("run: configured output files are written and reproducible") {
    const fs::path a = scratch() / "runA";
    const fs::path b = scratch() / "runB";
    fs::create_directories(a);
    fs::create_directories(b);
    const std::string args = "run \"" + scenario("reset_ramp.json").string() + "\"";

    const CliResult ra = run_cli(args, a);
    REQUIRE(ra.exit_code == 0);
    CHECK(ra.out.empty());  // report goes to the configured file
    const CliResult rb = run_cli(args, b);
    REQUIRE(rb.exit_code == 0);

    const std::string report_a = read_all(a / "out/reset_ramp_report.json");
    const std::string traj_a = read_all(a / "out/reset_ramp_trajectory.csv");
    REQUIRE_FALSE(report_a.empty());
    REQUIRE_FALSE(traj_a.empty());
    CHECK(report_a == read_all(b / "out/reset_ramp_report.json"));
    CHECK(traj_a == read_all(b / "out/reset_ramp_trajectory.csv"));

    CHECK(traj_a.rfind("t,E,S1,F1,S_rel,W_cum,Q_cum,Sigma_running\n", 0) == 0);
    std::size_t rows = 0;
    for (char ch : traj_a)
        if (ch == '\n') ++rows;
    CHECK(rows == 2002);  // header + 2001 instants
}

TEST_CASE("verify: every bundled scenario passes at the default thresholds") {
    for (const char* name : {"static_equilibrium.json", "sudden_quench.json", "reset_ramp.json",
                             "reset_ramp_quantum.json", "quantum_smooth_ramp.json"}) {
        CAPTURE(name);
        const CliResult r = run_cli("verify \"" + scenario(name).string() + "\"");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("\"pass\": true") != std::string::npos);
    }
}

TEST_CASE("verify: an impossible threshold exits 1 with the summary on stderr") {
    const CliResult r =
        run_cli("verify \"" + scenario("reset_ramp.json").string() + "\" --identity-tol 0");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit 2") {
    SUBCASE("missing config file") {
        const CliResult r = run_cli("run \"" + (scratch() / "nope.json").string() + "\"");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("cannot read config file") != std::string::npos);
    }
    SUBCASE("malformed JSON") {
        const fs::path bad = scratch() / "bad.json";
        write_all(bad, "{");
        const CliResult r = run_cli("run \"" + bad.string() + "\"");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("error:") != std::string::npos);
    }
    SUBCASE("invalid field value") {
        const fs::path bad = scratch() / "bad_beta.json";
        write_all(bad, R"({"kind": "classical", "dim": 2, "beta": -1, "tau": 1, "coupling": 1,
          "schedule": [[[0, 0], [1, 0]], [[0, 1], [1, 1]]], "initial_state": "gibbs"})");
        const CliResult r = run_cli("run \"" + bad.string() + "\"");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("beta must be > 0") != std::string::npos);
    }
    SUBCASE("unknown flag") {
        const CliResult r = run_cli("run \"" + scenario("static_equilibrium.json").string() +
                                    "\" --bogus");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("unknown subcommand") {
        CHECK(run_cli("frobnicate").exit_code == 2);
    }
    SUBCASE("no subcommand") {
        CHECK(run_cli("").exit_code == 2);
    }
    SUBCASE("sweep with an empty tau list") {
        const CliResult r = run_cli("sweep \"" + scenario("static_equilibrium.json").string() +
                                    "\" --taus ,");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("at least one tau") != std::string::npos);
    }
    SUBCASE("sweep with a malformed tau entry") {
        const CliResult r = run_cli("sweep \"" + scenario("static_equilibrium.json").string() +
                                    "\" --taus 1,1x");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("malformed tau list entry") != std::string::npos);
    }
}

TEST_CASE("help text exits 0") {
    const CliResult top = run_cli("--help");
    CHECK(top.exit_code == 0);
    CHECK(top.out.find("work-penalty") != std::string::npos);
    CHECK(run_cli("run --help").exit_code == 0);
}

TEST_CASE("sweep: one CSV row per duration, optional file output") {
    const std::string base = "sweep \"" + scenario("static_equilibrium.json").string() +
                             "\" --taus 0.5,1 --steps-per-unit-time 10";
    const CliResult r = run_cli(base);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.rfind("tau,", 0) == 0);
    std::size_t rows = 0;
    for (char ch : r.out)
        if (ch == '\n') ++rows;
    CHECK(rows == 3);

    const fs::path out = scratch() / "sweep.csv";
    const CliResult rf = run_cli(base + " --output \"" + out.string() + "\"");
    REQUIRE(rf.exit_code == 0);
    CHECK(rf.out.empty());
    CHECK(read_all(out) == r.out);
}

TEST_CASE("optimize: improves on the seed protocol and reports JSON") {
    const fs::path cfg_path = scratch() / "optimize_me.json";
    const std::string cfg_text = R"({
      "kind": "classical", "dim": 2, "beta": 1.0, "tau": 3.0, "coupling": 1.0,
      "schedule": [[[0.0, 0.0], [3.0, 0.0]],
                   [[0.0, 0.01], [1.5, 3.0], [3.0, 4.0]]],
      "initial_state": "gibbs"
    })";
    write_all(cfg_path, cfg_text);

    // Seed objective value, computed in-process for the same resolution.
    const workpen::ScenarioConfig cfg = workpen::parse_config(cfg_text);
    const workpen::ClassicalRampFamily fam = workpen::classical_family(cfg);
    const workpen::ClassicalProtocol seed_proto = fam.at_tau(cfg.tau);
    const workpen::TrajectoryLedger led = workpen::integrate_classical(
        seed_proto, fam.initial_state(), workpen::steps_for_tau(cfg.tau, 10));
    const workpen::DecompositionReport seed_rep =
        workpen::decompose(led, seed_proto.levels_at(0.0), seed_proto.levels_at(cfg.tau),
                           seed_proto.temp());

    const CliResult r = run_cli("optimize \"" + cfg_path.string() +
                                "\" --budget 60 --bounds 0.01:4 --steps-per-unit-time 10");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    REQUIRE(doc["best_parameters"].size() == 1);
    CHECK(doc["evaluations"].get<int>() >= 1);
    CHECK(doc["evaluations"].get<int>() <= 60);
    CHECK(doc["best_W_pn"].get<double>() <= seed_rep.W_pn_direct + 1e-12);
}
