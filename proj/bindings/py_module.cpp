// Python bindings for the core operations: spectral helpers, thermodynamic
// state functions, and whole-scenario runs driven by the same JSON configs the
// CLI consumes.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "workpen/config.hpp"

namespace py = pybind11;
using namespace workpen;

namespace {

using NestedComplex = std::vector<std::vector<std::complex<double>>>;

ComplexMatrix to_matrix(const NestedComplex& rows) {
    const std::size_t n = rows.size();
    std::vector<Complex> entries;
    entries.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw DimMismatchError("matrix rows must all have length n");
        for (const auto& v : row) entries.push_back(v);
    }
    return ComplexMatrix(n, entries);
}

NestedComplex from_matrix(const ComplexMatrix& m) {
    NestedComplex rows(m.dim(), std::vector<std::complex<double>>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) rows[i][j] = m(i, j);
    return rows;
}

py::dict report_dict(const DecompositionReport& r) {
    py::dict d;
    d["W"] = r.W;
    d["W_qs"] = r.W_qs;
    d["W_pn_direct"] = r.W_pn_direct;
    d["Sigma"] = r.Sigma;
    d["dS_rel"] = r.dS_rel;
    d["W_pn_identity"] = r.W_pn_identity;
    d["identity_residual"] = r.identity_residual;
    d["first_law_residual"] = r.first_law_residual;
    d["dF1"] = r.dF1;
    return d;
}

DecompositionReport run_config(const ScenarioConfig& cfg) {
    if (cfg.kind == "classical") {
        const ClassicalProtocol proto = classical_protocol(cfg);
        const TrajectoryLedger led =
            integrate_classical(proto, classical_initial(cfg), cfg.steps);
        return decompose(led, proto.levels_at(0.0), proto.levels_at(cfg.tau), proto.temp());
    }
    const QuantumProtocol proto = quantum_protocol(cfg);
    const TrajectoryLedger led = integrate_quantum(proto, quantum_initial(cfg), cfg.steps);
    return decompose(led, HermitianOperator(proto.hamiltonian_at(0.0)),
                     HermitianOperator(proto.hamiltonian_at(cfg.tau)), proto.temp());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "finite-time work-penalty decomposition core";

    py::register_exception<Error>(m, "Error");

    m.def(
        "eigh",
        [](const NestedComplex& mat) {
            const SpectralDecomposition eig = eigh(HermitianOperator(to_matrix(mat)));
            return py::make_tuple(eig.values, from_matrix(eig.vectors));
        },
        py::arg("matrix"),
        "Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.");

    m.def(
        "partition_function",
        [](const std::vector<double>& levels, double beta) {
            return classical_partition_function(levels, Temperature(beta));
        },
        py::arg("levels"), py::arg("beta"));

    m.def(
        "equilibrium_free_energy",
        [](const std::vector<double>& levels, double beta) {
            return classical_free_energy(levels, Temperature(beta));
        },
        py::arg("levels"), py::arg("beta"));

    m.def(
        "gibbs",
        [](const std::vector<double>& levels, double beta) {
            return classical_gibbs(levels, Temperature(beta)).probs();
        },
        py::arg("levels"), py::arg("beta"), "Thermal occupation probabilities.");

    m.def(
        "gibbs_matrix",
        [](const NestedComplex& h, double beta) {
            return from_matrix(
                gibbs_state(HermitianOperator(to_matrix(h)), Temperature(beta)).matrix());
        },
        py::arg("hamiltonian"), py::arg("beta"));

    m.def(
        "shannon_entropy",
        [](const std::vector<double>& probs) { return shannon_entropy(ClassicalDistribution(probs)); },
        py::arg("probs"));

    m.def(
        "kl_divergence",
        [](const std::vector<double>& p, const std::vector<double>& q) {
            return kl_divergence(ClassicalDistribution(p), ClassicalDistribution(q));
        },
        py::arg("p"), py::arg("q"));

    m.def(
        "von_neumann_entropy",
        [](const NestedComplex& rho) { return von_neumann_entropy(DensityMatrix(to_matrix(rho))); },
        py::arg("rho"));

    m.def(
        "relative_entropy",
        [](const NestedComplex& rho, const NestedComplex& sigma) {
            return relative_entropy(DensityMatrix(to_matrix(rho)),
                                    DensityMatrix(to_matrix(sigma)));
        },
        py::arg("rho"), py::arg("sigma"));

    m.def(
        "run",
        [](const std::string& config_text) { return report_dict(run_config(parse_config(config_text))); },
        py::arg("config_json"),
        "Integrate a scenario given as JSON text and return the decomposition report.");

    m.def(
        "trajectory_csv",
        [](const std::string& config_text) {
            const ScenarioConfig cfg = parse_config(config_text);
            if (cfg.kind == "classical") {
                const ClassicalProtocol proto = classical_protocol(cfg);
                return trajectory_csv(integrate_classical(proto, classical_initial(cfg), cfg.steps),
                                      cfg.beta);
            }
            const QuantumProtocol proto = quantum_protocol(cfg);
            return trajectory_csv(integrate_quantum(proto, quantum_initial(cfg), cfg.steps),
                                  cfg.beta);
        },
        py::arg("config_json"));

    m.def(
        "sweep_csv",
        [](const std::string& config_text, const std::vector<double>& taus, std::size_t spt) {
            const ScenarioConfig cfg = parse_config(config_text);
            const SweepResult res = cfg.kind == "classical"
                                        ? tau_sweep(classical_family(cfg), taus, spt)
                                        : tau_sweep(quantum_family(cfg), taus, spt);
            return sweep_csv(res);
        },
        py::arg("config_json"), py::arg("taus"), py::arg("steps_per_unit_time") = 20);
}
