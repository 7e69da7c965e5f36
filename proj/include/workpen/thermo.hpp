// thermo.hpp — Equilibrium and nonequilibrium thermodynamic functionals.
// Conventions: k_B = 1, natural logarithms (entropies in nats), T = 1/beta.
#pragma once

#include <vector>

#include "workpen/spectral.hpp"

namespace workpen {

// Inverse temperature; beta strictly positive and finite (T = 0 out of scope).
class Temperature {
  public:
    explicit Temperature(double beta);

    double beta() const noexcept { return beta_; }
    double T() const noexcept { return 1.0 / beta_; }

  private:
    double beta_;
};

// Probability vector: entries ≥ −tol, sum within tol of 1.  Stored as given.
class ClassicalDistribution {
  public:
    explicit ClassicalDistribution(std::vector<double> probs, double tol = 1e-10);

    const std::vector<double>& probs() const noexcept { return p_; }
    std::size_t dim() const noexcept { return p_.size(); }

  private:
    std::vector<double> p_;
};

// ---- quantum functionals ----

// Z = Σ_k e^{−β λ_k}.  OverflowError when β·λ_min < −700.
double partition_function(const HermitianOperator& h, const Temperature& temp);

// F = −T ln Z, evaluated in spectrum-shifted form for accuracy.
double equilibrium_free_energy(const HermitianOperator& h, const Temperature& temp);

// ρ^G = e^{−βH} / Z.
DensityMatrix gibbs_state(const HermitianOperator& h, const Temperature& temp);
DensityMatrix gibbs_state(const SpectralDecomposition& eig, const Temperature& temp);

// E = Tr(ρH).
double energy(const DensityMatrix& rho, const HermitianOperator& h);

// S₁ = −Σ λ_k ln λ_k (0·ln 0 := 0; eigenvalues in [−1e−10, 0] treated as 0).
double von_neumann_entropy(const DensityMatrix& rho);

// S₁(ρ‖σ) = Tr ρ(ln ρ − ln σ), computed in σ's eigenbasis as −S₁(ρ) − Σ_k ⟨k|ρ|k⟩ ln s_k.
// Returns +infinity when support(ρ) ⊄ support(σ) (σ-eigenvalue < 1e−14 carrying
// ρ-weight > 1e−12).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// F₁ = E − T·S₁.
double noneq_free_energy(const DensityMatrix& rho, const HermitianOperator& h,
                         const Temperature& temp);

// F₁ − F − T·S₁(ρ‖ρ^G), each term evaluated independently; ≈ 0 for all valid inputs.
double free_energy_split_residual(const DensityMatrix& rho, const HermitianOperator& h,
                                  const Temperature& temp);

// ---- classical functionals ----

// Σ p_i ln(p_i/q_i) with 0·ln(0/q) := 0; +infinity on support violation.
double kl_divergence(const ClassicalDistribution& p, const ClassicalDistribution& q);

// −Σ p_i ln p_i.
double shannon_entropy(const ClassicalDistribution& p);

double classical_partition_function(const std::vector<double>& levels, const Temperature& temp);
double classical_free_energy(const std::vector<double>& levels, const Temperature& temp);
ClassicalDistribution classical_gibbs(const std::vector<double>& levels, const Temperature& temp);
double classical_energy(const ClassicalDistribution& p, const std::vector<double>& levels);

}  // namespace workpen
