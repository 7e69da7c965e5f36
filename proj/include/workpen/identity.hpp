// identity.hpp — Work-penalty decomposition of integrated trajectories,
// quantum→classical reduction checks, duration sweeps, protocol optimization.
// Central relation, checked by construction on every decomposition:
//   W − ΔF = T·(ΔS_rel + Σ),   Σ = ΔS₁ − Q/T.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "workpen/dynamics.hpp"

namespace workpen {

// Two independent evaluations of the work penalty plus their residual.
struct DecompositionReport {
    double W = 0.0;                   // integrated work
    double W_qs = 0.0;                // ΔF of the endpoint Hamiltonians
    double W_pn_direct = 0.0;         // W − W_qs
    double Sigma = 0.0;               // ΔS₁ − βQ
    double dS_rel = 0.0;              // ΔS₁(state‖instantaneous Gibbs)
    double W_pn_identity = 0.0;       // T·(dS_rel + Sigma)
    double identity_residual = 0.0;   // W_pn_direct − W_pn_identity
    double first_law_residual = 0.0;  // ΔE − W − Q
    double dF1 = 0.0;                 // ΔF₁ (fixed-endpoint reference, reported alongside)
};

struct SweepResult {
    std::vector<double> taus;
    std::vector<DecompositionReport> reports;
};

struct OptimizationResult {
    std::vector<double> best_parameters;
    double best_W_pn = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

// Σ = (S₁(τ) − S₁(0)) − β·Q from the ledger snapshots.
double entropy_production(const TrajectoryLedger& ledger, const Temperature& temp);

// Full report from a quantum ledger; endpoint Hamiltonians must reproduce the
// ledger's endpoint energies.
DecompositionReport decompose(const TrajectoryLedger& ledger, const HermitianOperator& h_initial,
                              const HermitianOperator& h_final, const Temperature& temp);

// Classical counterpart with endpoint level vectors.
DecompositionReport decompose(const TrajectoryLedger& ledger,
                              const std::vector<double>& levels_initial,
                              const std::vector<double>& levels_final, const Temperature& temp);

// Runs both engines on a diagonal drive and returns the largest disagreement
// over {W, Q, Sigma, dS_rel, W_pn_direct}.  NotDiagonalError when the quantum
// side is not a diagonal restatement of the classical one (beyond 1e−12).
double diagonal_reduction_check(const QuantumProtocol& qproto, const ClassicalProtocol& cproto,
                                const DensityMatrix& rho0, std::size_t steps);

// Protocol shapes on the unit interval, rescaled to any duration.  Absent an
// explicit initial state the trajectory starts from the Gibbs state of the
// initial drive.
struct ClassicalRampFamily {
    std::vector<Schedule> unit_schedules;  // knot times in [0, 1]
    double gamma;
    Temperature temp;
    std::optional<std::vector<double>> initial_probs;

    ClassicalProtocol at_tau(double tau) const;
    ClassicalDistribution initial_state() const;
};

struct QuantumRampFamily {
    std::vector<std::pair<double, ComplexMatrix>> unit_knots;  // knot times in [0, 1]
    double gamma0;
    Temperature temp;
    std::optional<ComplexMatrix> initial_state_matrix;

    QuantumProtocol at_tau(double tau) const;
    DensityMatrix initial_state() const;
};

// One decomposition per duration; steps = max(200, round(τ·steps_per_unit_time)).
SweepResult tau_sweep(const ClassicalRampFamily& family, const std::vector<double>& taus,
                      std::size_t steps_per_unit_time);
SweepResult tau_sweep(const QuantumRampFamily& family, const std::vector<double>& taus,
                      std::size_t steps_per_unit_time);

// Derivative-free simplex minimization (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5) with componentwise bound clamping.  `budget`
// caps objective evaluations; on exhaustion the best point seen so far is
// returned with converged = false.  converged = simplex max-norm diameter
// < 1e−4.  Deterministic: no randomness, stable tie-breaking.
OptimizationResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                               std::vector<double> x0,
                               const std::vector<std::pair<double, double>>& bounds,
                               std::size_t budget);

// Minimizes W_pn_direct at fixed duration over the interior knot values of
// the family's schedules (taken in schedule order, then knot order).  The
// family's own interior values seed the search.
OptimizationResult optimize_protocol(const ClassicalRampFamily& family, double tau,
                                     const std::vector<std::pair<double, double>>& bounds,
                                     std::size_t budget, std::size_t steps_per_unit_time = 20);

// Quantum variant: parameters are the interior knots' independent Hermitian
// entries, per knot: N diagonal reals, then (re, im) per upper off-diagonal.
OptimizationResult optimize_protocol(const QuantumRampFamily& family, double tau,
                                     const std::vector<std::pair<double, double>>& bounds,
                                     std::size_t budget, std::size_t steps_per_unit_time = 20);

// Evaluation count used by sweeps and the optimizer for a given duration.
std::size_t steps_for_tau(double tau, std::size_t steps_per_unit_time);

}  // namespace workpen
