// workpen — batch front door: run/verify/sweep/optimize over JSON scenarios.
// Exit codes: 0 success, 1 verification failure, 2 usage/config/runtime error.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "workpen/config.hpp"

namespace {

using namespace workpen;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Whole-file write, parents created; nothing is written until the content is
// fully computed.
void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write output file: " + path);
    out << content;
}

struct RunOutput {
    DecompositionReport report;
    TrajectoryLedger ledger;
};

RunOutput run_scenario(const ScenarioConfig& cfg) {
    if (cfg.kind == "classical") {
        const ClassicalProtocol proto = classical_protocol(cfg);
        TrajectoryLedger led = integrate_classical(proto, classical_initial(cfg), cfg.steps);
        DecompositionReport rep =
            decompose(led, proto.levels_at(0.0), proto.levels_at(cfg.tau), proto.temp());
        return {rep, std::move(led)};
    }
    const QuantumProtocol proto = quantum_protocol(cfg);
    TrajectoryLedger led = integrate_quantum(proto, quantum_initial(cfg), cfg.steps);
    DecompositionReport rep = decompose(led, HermitianOperator(proto.hamiltonian_at(0.0)),
                                        HermitianOperator(proto.hamiltonian_at(cfg.tau)),
                                        proto.temp());
    return {rep, std::move(led)};
}

int cmd_run(const std::string& config_path) {
    const ScenarioConfig cfg = parse_config(read_file(config_path));
    const RunOutput out = run_scenario(cfg);
    const std::string report = report_json(out.report);
    const std::string csv = trajectory_csv(out.ledger, cfg.beta);
    if (!cfg.report_path.empty()) {
        write_file(cfg.report_path, report);
    } else {
        std::cout << report;
    }
    if (!cfg.trajectory_path.empty()) write_file(cfg.trajectory_path, csv);
    return 0;
}

int cmd_verify(const std::string& config_path, double identity_tol, double first_law_tol,
               double second_law_tol) {
    const ScenarioConfig cfg = parse_config(read_file(config_path));
    const RunOutput out = run_scenario(cfg);
    const DecompositionReport& r = out.report;
    nlohmann::json summary;
    summary["identity_residual"] = r.identity_residual;
    summary["first_law_residual"] = r.first_law_residual;
    summary["Sigma"] = r.Sigma;
    summary["thresholds"] = {{"identity", identity_tol},
                             {"first_law", first_law_tol},
                             {"second_law", second_law_tol}};
    const bool pass = std::abs(r.identity_residual) <= identity_tol &&
                      std::abs(r.first_law_residual) <= first_law_tol &&
                      r.Sigma >= -second_law_tol;
    summary["pass"] = pass;
    if (pass) {
        std::cout << summary.dump(2) << "\n";
        return 0;
    }
    std::cerr << summary.dump(2) << "\n";
    return 1;
}

std::vector<double> parse_tau_list(const std::string& cstaus) {
    std::vector<double> taus;
    std::stringstream ss(cstaus);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw ValidationError("sweep: malformed tau list entry: " + item);
        taus.push_back(v);
    }
    if (taus.empty()) throw ValidationError("sweep: at least one tau is required");
    return taus;
}

int cmd_sweep(const std::string& config_path, const std::string& cstaus, std::size_t spt,
              const std::string& output) {
    const ScenarioConfig cfg = parse_config(read_file(config_path));
    const std::vector<double> taus = parse_tau_list(cstaus);
    const SweepResult sweep = cfg.kind == "classical"
                                  ? tau_sweep(classical_family(cfg), taus, spt)
                                  : tau_sweep(quantum_family(cfg), taus, spt);
    const std::string csv = sweep_csv(sweep);
    if (!output.empty()) {
        write_file(output, csv);
    } else {
        std::cout << csv;
    }
    return 0;
}

std::vector<std::pair<double, double>> parse_bounds_list(const std::string& text) {
    std::vector<std::pair<double, double>> bounds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw ValidationError("optimize: bounds entries must look like lo:hi");
        }
        bounds.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    return bounds;
}

// Default search box per parameter: the seed value ± max(1, |seed|).
std::vector<std::pair<double, double>> default_bounds(const std::vector<double>& seed) {
    std::vector<std::pair<double, double>> bounds;
    bounds.reserve(seed.size());
    for (double x : seed) {
        const double s = std::max(1.0, std::abs(x));
        bounds.emplace_back(x - s, x + s);
    }
    return bounds;
}

std::vector<double> interior_seed_classical(const ClassicalRampFamily& fam) {
    std::vector<double> seed;
    for (const auto& s : fam.unit_schedules)
        for (std::size_t k = 1; k + 1 < s.knots().size(); ++k) seed.push_back(s.knots()[k].second);
    return seed;
}

std::vector<double> interior_seed_quantum(const QuantumRampFamily& fam) {
    std::vector<double> seed;
    const std::size_t n = fam.unit_knots.front().second.dim();
    for (std::size_t k = 1; k + 1 < fam.unit_knots.size(); ++k) {
        const ComplexMatrix& m = fam.unit_knots[k].second;
        for (std::size_t i = 0; i < n; ++i) seed.push_back(m(i, i).real());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                seed.push_back(m(i, j).real());
                seed.push_back(m(i, j).imag());
            }
    }
    return seed;
}

int cmd_optimize(const std::string& config_path, std::size_t budget, const std::string& bounds_str,
                 std::size_t spt) {
    const ScenarioConfig cfg = parse_config(read_file(config_path));
    OptimizationResult result;
    if (cfg.kind == "classical") {
        const ClassicalRampFamily fam = classical_family(cfg);
        const std::vector<double> seed = interior_seed_classical(fam);
        const auto bounds = bounds_str.empty() ? default_bounds(seed) : parse_bounds_list(bounds_str);
        result = optimize_protocol(fam, cfg.tau, bounds, budget, spt);
    } else {
        const QuantumRampFamily fam = quantum_family(cfg);
        const std::vector<double> seed = interior_seed_quantum(fam);
        const auto bounds = bounds_str.empty() ? default_bounds(seed) : parse_bounds_list(bounds_str);
        result = optimize_protocol(fam, cfg.tau, bounds, budget, spt);
    }
    nlohmann::json doc;
    doc["best_parameters"] = result.best_parameters;
    doc["best_W_pn"] = result.best_W_pn;
    doc["evaluations"] = result.evaluations;
    doc["converged"] = result.converged;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-time work-penalty simulator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "integrate a scenario and write report/trajectory");
    run->add_option("config", config_path, "scenario JSON")->required();

    double identity_tol = 1e-6, first_law_tol = 1e-6, second_law_tol = 1e-8;
    auto* verify = app.add_subcommand("verify", "run and gate on residual thresholds");
    verify->add_option("config", config_path, "scenario JSON")->required();
    verify->add_option("--identity-tol", identity_tol, "|identity residual| threshold");
    verify->add_option("--first-law-tol", first_law_tol, "|first-law residual| threshold");
    verify->add_option("--second-law-tol", second_law_tol, "entropy-production slack");

    std::string taus_str, sweep_output;
    std::size_t spt = 20;
    auto* sweep = app.add_subcommand("sweep", "decompose across a list of durations");
    sweep->add_option("config", config_path, "scenario JSON")->required();
    sweep->add_option("--taus", taus_str, "comma-separated durations")->required();
    sweep->add_option("--steps-per-unit-time", spt, "integration resolution");
    sweep->add_option("--output", sweep_output, "sweep CSV path (stdout when omitted)");

    std::size_t budget = 500;
    std::string bounds_str;
    auto* optimize = app.add_subcommand("optimize", "minimize the work penalty over interior knots");
    optimize->add_option("config", config_path, "scenario JSON")->required();
    optimize->add_option("--budget", budget, "max objective evaluations");
    optimize->add_option("--bounds", bounds_str, "comma-separated lo:hi per parameter");
    optimize->add_option("--steps-per-unit-time", spt, "integration resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(run)) return cmd_run(config_path);
        if (app.got_subcommand(verify)) {
            return cmd_verify(config_path, identity_tol, first_law_tol, second_law_tol);
        }
        if (app.got_subcommand(sweep)) return cmd_sweep(config_path, taus_str, spt, sweep_output);
        if (app.got_subcommand(optimize)) return cmd_optimize(config_path, budget, bounds_str, spt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
