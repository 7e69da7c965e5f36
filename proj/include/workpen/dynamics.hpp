// dynamics.hpp — Driven dissipative dynamics with a thermodynamic ledger.
// Classical: Pauli master equation ṗ = R(t)p with detailed-balance rates.
// Quantum: GKSL equation with jump operators in the instantaneous eigenbasis
// of H(t) and thermal rates γ↑/γ↓ = e^{−βω}.
// Sign conventions: ΔE = W + Q, heat positive flowing from bath into system.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "workpen/spectral.hpp"
#include "workpen/thermo.hpp"

namespace workpen {

// Piecewise-linear control curve on [0, τ]; knot times strictly increasing,
// first knot at t = 0.
class Schedule {
  public:
    explicit Schedule(std::vector<std::pair<double, double>> knots);

    const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }
    double start_time() const noexcept { return knots_.front().first; }
    double end_time() const noexcept { return knots_.back().first; }

  private:
    std::vector<std::pair<double, double>> knots_;
};

// Linear interpolation, exact at knots.  OutOfRangeError outside [0, τ].
double sample_schedule(const Schedule& s, double t);

// Driven N-level system: one level schedule per level, bath coupling Γ.
class ClassicalProtocol {
  public:
    ClassicalProtocol(double tau, std::vector<Schedule> level_schedules, double gamma,
                      Temperature temp);

    double tau() const noexcept { return tau_; }
    std::size_t dim() const noexcept { return levels_.size(); }
    double gamma() const noexcept { return gamma_; }
    const Temperature& temp() const noexcept { return temp_; }

    std::vector<double> levels_at(double t) const;

  private:
    double tau_;
    std::vector<Schedule> levels_;
    double gamma_;
    Temperature temp_;
};

// Driven open quantum system: Hamiltonian knots interpolated entrywise
// (re-hermitized), bath coupling Γ₀, thermal eigenbasis dissipator.
class QuantumProtocol {
  public:
    QuantumProtocol(double tau, std::vector<std::pair<double, ComplexMatrix>> hamiltonian_knots,
                    double gamma0, Temperature temp);

    double tau() const noexcept { return tau_; }
    std::size_t dim() const noexcept { return dim_; }
    double gamma0() const noexcept { return gamma0_; }
    const Temperature& temp() const noexcept { return temp_; }
    const std::vector<std::pair<double, ComplexMatrix>>& knots() const noexcept { return knots_; }

    ComplexMatrix hamiltonian_at(double t) const;

  private:
    double tau_;
    std::vector<std::pair<double, ComplexMatrix>> knots_;
    std::size_t dim_;
    double gamma0_;
    Temperature temp_;
};

// Per-instant record of the integrated trajectory.  work/heat are cumulative;
// sigma_running = (S1 − S1[0]) − β·heat.  Exactly one of the state vectors is
// populated, matching `quantum`.
struct TrajectoryLedger {
    bool quantum = false;
    std::vector<double> times;
    std::vector<double> work;
    std::vector<double> heat;
    std::vector<double> energy;       // E = Tr(ρH) / Σ p_i ε_i
    std::vector<double> entropy;      // S₁
    std::vector<double> noneq_f;      // F₁ = E − T·S₁
    std::vector<double> rel_entropy;  // S₁(state ‖ instantaneous Gibbs)
    std::vector<DensityMatrix> quantum_states;
    std::vector<ClassicalDistribution> classical_states;

    double total_work() const { return work.back(); }
    double total_heat() const { return heat.back(); }
};

// Detailed-balance jump rates toward the Gibbs state of `levels`:
// off-diagonal R_ij = Γ·min(1, e^{−β(ε_i−ε_j)}) (rate of j→i), diagonal
// R_jj = −Σ_{i≠j} R_ij; columns sum to zero and R·gibbs = 0.  These are
// exactly the level-population rates of the quantum dissipator below, so
// diagonal quantum scenarios reduce to this generator.
// Returned row-major, dimension levels.size().
std::vector<double> classical_rate_matrix(const std::vector<double>& levels,
                                          const Temperature& temp, double gamma);

// −i[H,ρ] + Σ_pairs γ D[L]ρ in the instantaneous eigenbasis of H; traceless
// and Hermitian.  DegenerateSpectrumError when any gap < 1e−9.
ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const HermitianOperator& h,
                           const Temperature& temp, double gamma0);

// Fixed-step RK4 on ṗ = R(t)p.  Work/heat accumulated per step by Simpson's
// rule with a cubic-Hermite midpoint state; ε̇ by central differences
// (h = dt/2; second-order one-sided at t = 0, τ).  StepTooLargeError if a
// step leaves the probability simplex by more than 1e−8.
TrajectoryLedger integrate_classical(const ClassicalProtocol& proto,
                                     const ClassicalDistribution& p0, std::size_t steps);

// Quantum counterpart on the GKSL generator; Ẇ = Tr(ρḢ), Q̇ = Tr(D(ρ)H).
TrajectoryLedger integrate_quantum(const QuantumProtocol& proto, const DensityMatrix& rho0,
                                   std::size_t steps);

// (E_final − E_initial) − W − Q from the ledger snapshots.
double first_law_residual(const TrajectoryLedger& ledger);

// Same, with endpoint energies recomputed against explicitly supplied
// endpoint Hamiltonians / level vectors.
double first_law_residual(const TrajectoryLedger& ledger, const HermitianOperator& h_initial,
                          const HermitianOperator& h_final);
double first_law_residual(const TrajectoryLedger& ledger,
                          const std::vector<double>& levels_initial,
                          const std::vector<double>& levels_final);

// Acceptance tolerance for the first-law residual: 1e−6 at 2000 steps,
// scaling as (2000/steps)².
double first_law_tolerance(std::size_t steps);

}  // namespace workpen
