// config.hpp — Scenario configuration (JSON in, validated objects out) and
// the text output formats (report JSON, trajectory/sweep CSV).
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "workpen/identity.hpp"

namespace workpen {

// One simulation scenario.  `kind` selects which of the schedule/initial
// representations is populated.
struct ScenarioConfig {
    std::string kind;  // "classical" | "quantum"
    std::size_t dim = 0;
    double beta = 0.0;
    double tau = 0.0;
    std::size_t steps = 2000;
    double coupling = 0.0;
    std::vector<std::vector<std::pair<double, double>>> level_knots;     // classical
    std::vector<std::pair<double, ComplexMatrix>> hamiltonian_knots;     // quantum
    bool gibbs_start = true;
    std::vector<double> initial_probs;  // explicit classical start
    ComplexMatrix initial_matrix;       // explicit quantum start
    std::string report_path;
    std::string trajectory_path;
    long long seed = 0;

    bool operator==(const ScenarioConfig&) const = default;
};

// Strict parse: unknown fields rejected, every invariant checked (including
// all downstream constructor validations).  ParseError on malformed JSON,
// ValidationError naming the violated invariant otherwise.
ScenarioConfig parse_config(const std::string& text);

// Canonical JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

// Builders (validated; call the matching pair for cfg.kind).
ClassicalProtocol classical_protocol(const ScenarioConfig& cfg);
ClassicalDistribution classical_initial(const ScenarioConfig& cfg);
QuantumProtocol quantum_protocol(const ScenarioConfig& cfg);
DensityMatrix quantum_initial(const ScenarioConfig& cfg);

// Unit-duration ramp families for sweeps/optimization (knot times divided by
// cfg.tau).
ClassicalRampFamily classical_family(const ScenarioConfig& cfg);
QuantumRampFamily quantum_family(const ScenarioConfig& cfg);

// Report JSON: keys mirror the DecompositionReport fields, plus a
// "conventions" block (k_B = 1, nats, heat positive into the system, W_qs
// reference).
std::string report_json(const DecompositionReport& rep);

// Trajectory CSV: t,E,S1,F1,S_rel,W_cum,Q_cum,Sigma_running with a header
// row; 17 significant digits throughout.
std::string trajectory_csv(const TrajectoryLedger& ledger, double beta);

// Sweep CSV: tau plus every report field, one row per duration.
std::string sweep_csv(const SweepResult& sweep);

}  // namespace workpen
