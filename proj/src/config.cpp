#include "workpen/config.hpp"

#include <cstdio>
#include <set>

#include "json.hpp"

namespace workpen {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const char* where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ValidationError(std::string(where) + ": unknown field \"" + key + "\"");
        }
    }
}

double number_field(const json& obj, const char* name) {
    if (!obj.contains(name) || !obj[name].is_number()) {
        throw ValidationError(std::string(name) + " must be a number");
    }
    return obj[name].get<double>();
}

Complex decode_entry(const json& e, const char* where) {
    if (e.is_number()) return Complex(e.get<double>(), 0.0);
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        return Complex(e[0].get<double>(), e[1].get<double>());
    }
    throw ValidationError(std::string(where) + ": matrix entries must be numbers or [re, im]");
}

ComplexMatrix decode_matrix(const json& m, std::size_t dim, const char* where) {
    if (!m.is_array() || m.size() != dim) {
        throw ValidationError(std::string(where) + ": expected " + std::to_string(dim) + " rows");
    }
    ComplexMatrix out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!m[i].is_array() || m[i].size() != dim) {
            throw ValidationError(std::string(where) + ": expected square row-major matrix");
        }
        for (std::size_t j = 0; j < dim; ++j) out(i, j) = decode_entry(m[i][j], where);
    }
    return out;
}

json encode_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not well-formed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    reject_unknown(doc, {"kind", "dim", "beta", "tau", "steps", "coupling", "schedule",
                         "initial_state", "outputs", "seed"},
                   "config");

    ScenarioConfig cfg;
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        throw ValidationError("kind must be \"classical\" or \"quantum\"");
    }
    cfg.kind = doc["kind"].get<std::string>();
    if (cfg.kind != "classical" && cfg.kind != "quantum") {
        throw ValidationError("kind must be \"classical\" or \"quantum\"");
    }
    if (!doc.contains("dim") || !doc["dim"].is_number_integer()) {
        throw ValidationError("dim must be an integer");
    }
    const long long dim_raw = doc["dim"].get<long long>();
    if (dim_raw < 2) throw ValidationError("dim must be >= 2");
    cfg.dim = static_cast<std::size_t>(dim_raw);

    cfg.beta = number_field(doc, "beta");
    if (!(cfg.beta > 0.0)) throw ValidationError("beta must be > 0");
    cfg.tau = number_field(doc, "tau");
    if (!(cfg.tau > 0.0)) throw ValidationError("tau must be > 0");
    cfg.coupling = number_field(doc, "coupling");
    if (!(cfg.coupling > 0.0)) throw ValidationError("coupling must be > 0");

    if (doc.contains("steps")) {
        if (!doc["steps"].is_number_integer() || doc["steps"].get<long long>() < 1) {
            throw ValidationError("steps must be an integer >= 1");
        }
        cfg.steps = static_cast<std::size_t>(doc["steps"].get<long long>());
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) throw ValidationError("seed must be an integer");
        cfg.seed = doc["seed"].get<long long>();
    }
    if (doc.contains("outputs")) {
        const json& out = doc["outputs"];
        if (!out.is_object()) throw ValidationError("outputs must be an object");
        reject_unknown(out, {"report", "trajectory"}, "outputs");
        if (out.contains("report")) {
            if (!out["report"].is_string()) throw ValidationError("outputs.report must be a path");
            cfg.report_path = out["report"].get<std::string>();
        }
        if (out.contains("trajectory")) {
            if (!out["trajectory"].is_string()) {
                throw ValidationError("outputs.trajectory must be a path");
            }
            cfg.trajectory_path = out["trajectory"].get<std::string>();
        }
    }

    if (!doc.contains("schedule") || !doc["schedule"].is_array()) {
        throw ValidationError("schedule must be an array");
    }
    const json& sched = doc["schedule"];
    if (cfg.kind == "classical") {
        if (sched.size() != cfg.dim) {
            throw ValidationError("schedule must list one knot sequence per level");
        }
        for (const json& level : sched) {
            if (!level.is_array() || level.size() < 2) {
                throw ValidationError("schedule: each level needs at least two [t, value] knots");
            }
            std::vector<std::pair<double, double>> knots;
            for (const json& k : level) {
                if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
                    throw ValidationError("schedule: knots must be [t, value] number pairs");
                }
                knots.emplace_back(k[0].get<double>(), k[1].get<double>());
            }
            cfg.level_knots.push_back(std::move(knots));
        }
    } else {
        if (sched.size() < 2) {
            throw ValidationError("schedule needs at least two Hamiltonian knots");
        }
        for (const json& k : sched) {
            if (!k.is_object()) throw ValidationError("schedule: knots must be {t, h} objects");
            reject_unknown(k, {"t", "h"}, "schedule knot");
            const double t = number_field(k, "t");
            if (!k.contains("h")) throw ValidationError("schedule knot: missing \"h\" matrix");
            cfg.hamiltonian_knots.emplace_back(t, decode_matrix(k["h"], cfg.dim, "schedule knot"));
        }
    }

    if (!doc.contains("initial_state")) throw ValidationError("initial_state is required");
    const json& init = doc["initial_state"];
    if (init.is_string()) {
        if (init.get<std::string>() != "gibbs") {
            throw ValidationError("initial_state must be \"gibbs\" or an explicit state");
        }
        cfg.gibbs_start = true;
    } else if (cfg.kind == "classical") {
        if (!init.is_array() || init.size() != cfg.dim) {
            throw ValidationError("initial_state must list one probability per level");
        }
        cfg.gibbs_start = false;
        for (const json& x : init) {
            if (!x.is_number()) throw ValidationError("initial_state entries must be numbers");
            cfg.initial_probs.push_back(x.get<double>());
        }
    } else {
        cfg.gibbs_start = false;
        cfg.initial_matrix = decode_matrix(init, cfg.dim, "initial_state");
    }

    // Everything the engines would reject must already fail here.
    try {
        if (cfg.kind == "classical") {
            classical_protocol(cfg);
            classical_initial(cfg);
        } else {
            quantum_protocol(cfg);
            quantum_initial(cfg);
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const NonHermitianError&) {
        throw ValidationError("schedule: hermiticity violated at a Hamiltonian knot");
    } catch (const Error& e) {
        throw ValidationError(e.what());
    }
    return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json doc;
    doc["kind"] = cfg.kind;
    doc["dim"] = cfg.dim;
    doc["beta"] = cfg.beta;
    doc["tau"] = cfg.tau;
    doc["steps"] = cfg.steps;
    doc["coupling"] = cfg.coupling;
    doc["seed"] = cfg.seed;
    if (cfg.kind == "classical") {
        json levels = json::array();
        for (const auto& knots : cfg.level_knots) {
            json level = json::array();
            for (const auto& [t, v] : knots) level.push_back(json::array({t, v}));
            levels.push_back(level);
        }
        doc["schedule"] = levels;
    } else {
        json knots = json::array();
        for (const auto& [t, m] : cfg.hamiltonian_knots) {
            knots.push_back(json{{"t", t}, {"h", encode_matrix(m)}});
        }
        doc["schedule"] = knots;
    }
    if (cfg.gibbs_start) {
        doc["initial_state"] = "gibbs";
    } else if (cfg.kind == "classical") {
        doc["initial_state"] = cfg.initial_probs;
    } else {
        doc["initial_state"] = encode_matrix(cfg.initial_matrix);
    }
    json outputs = json::object();
    if (!cfg.report_path.empty()) outputs["report"] = cfg.report_path;
    if (!cfg.trajectory_path.empty()) outputs["trajectory"] = cfg.trajectory_path;
    if (!outputs.empty()) doc["outputs"] = outputs;
    return doc.dump(2) + "\n";
}

ClassicalProtocol classical_protocol(const ScenarioConfig& cfg) {
    std::vector<Schedule> schedules;
    schedules.reserve(cfg.level_knots.size());
    for (const auto& knots : cfg.level_knots) schedules.emplace_back(knots);
    return ClassicalProtocol(cfg.tau, std::move(schedules), cfg.coupling, Temperature(cfg.beta));
}

ClassicalDistribution classical_initial(const ScenarioConfig& cfg) {
    if (!cfg.gibbs_start) return ClassicalDistribution(cfg.initial_probs);
    const ClassicalProtocol proto = classical_protocol(cfg);
    return classical_gibbs(proto.levels_at(0.0), proto.temp());
}

QuantumProtocol quantum_protocol(const ScenarioConfig& cfg) {
    return QuantumProtocol(cfg.tau, cfg.hamiltonian_knots, cfg.coupling, Temperature(cfg.beta));
}

DensityMatrix quantum_initial(const ScenarioConfig& cfg) {
    if (!cfg.gibbs_start) return DensityMatrix(cfg.initial_matrix);
    const QuantumProtocol proto = quantum_protocol(cfg);
    return gibbs_state(HermitianOperator(proto.hamiltonian_at(0.0)), proto.temp());
}

ClassicalRampFamily classical_family(const ScenarioConfig& cfg) {
    ClassicalRampFamily fam{{}, cfg.coupling, Temperature(cfg.beta), {}};
    for (const auto& knots : cfg.level_knots) {
        std::vector<std::pair<double, double>> unit = knots;
        for (auto& [t, v] : unit) t /= cfg.tau;
        unit.back().first = 1.0;  // pin the endpoint against division round-off
        fam.unit_schedules.emplace_back(std::move(unit));
    }
    if (!cfg.gibbs_start) fam.initial_probs = cfg.initial_probs;
    return fam;
}

QuantumRampFamily quantum_family(const ScenarioConfig& cfg) {
    QuantumRampFamily fam{{}, cfg.coupling, Temperature(cfg.beta), {}};
    fam.unit_knots = cfg.hamiltonian_knots;
    for (auto& [t, m] : fam.unit_knots) t /= cfg.tau;
    fam.unit_knots.back().first = 1.0;
    if (!cfg.gibbs_start) fam.initial_state_matrix = cfg.initial_matrix;
    return fam;
}

std::string report_json(const DecompositionReport& rep) {
    json doc;
    doc["W"] = rep.W;
    doc["W_qs"] = rep.W_qs;
    doc["W_pn_direct"] = rep.W_pn_direct;
    doc["Sigma"] = rep.Sigma;
    doc["dS_rel"] = rep.dS_rel;
    doc["W_pn_identity"] = rep.W_pn_identity;
    doc["identity_residual"] = rep.identity_residual;
    doc["first_law_residual"] = rep.first_law_residual;
    doc["dF1"] = rep.dF1;
    doc["conventions"] = json{
        {"k_B", 1},
        {"entropy_units", "nats"},
        {"heat_sign", "positive into the system"},
        {"W_qs_reference",
         "equilibrium free-energy difference of the endpoint Hamiltonians; "
         "the fixed-endpoint alternative is reported as dF1"},
    };
    return doc.dump(2) + "\n";
}

std::string trajectory_csv(const TrajectoryLedger& ledger, double beta) {
    std::string out = "t,E,S1,F1,S_rel,W_cum,Q_cum,Sigma_running\n";
    for (std::size_t k = 0; k < ledger.times.size(); ++k) {
        const double sigma_running =
            (ledger.entropy[k] - ledger.entropy.front()) - beta * ledger.heat[k];
        out += fmt17(ledger.times[k]) + "," + fmt17(ledger.energy[k]) + "," +
               fmt17(ledger.entropy[k]) + "," + fmt17(ledger.noneq_f[k]) + "," +
               fmt17(ledger.rel_entropy[k]) + "," + fmt17(ledger.work[k]) + "," +
               fmt17(ledger.heat[k]) + "," + fmt17(sigma_running) + "\n";
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out =
        "tau,W,W_qs,W_pn_direct,Sigma,dS_rel,W_pn_identity,identity_residual,"
        "first_law_residual,dF1\n";
    for (std::size_t i = 0; i < sweep.taus.size(); ++i) {
        const DecompositionReport& r = sweep.reports[i];
        out += fmt17(sweep.taus[i]) + "," + fmt17(r.W) + "," + fmt17(r.W_qs) + "," +
               fmt17(r.W_pn_direct) + "," + fmt17(r.Sigma) + "," + fmt17(r.dS_rel) + "," +
               fmt17(r.W_pn_identity) + "," + fmt17(r.identity_residual) + "," +
               fmt17(r.first_law_residual) + "," + fmt17(r.dF1) + "\n";
    }
    return out;
}

}  // namespace workpen
