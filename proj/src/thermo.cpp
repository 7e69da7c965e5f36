#include "workpen/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace workpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Support thresholds shared by the quantum and classical relative entropies:
// a reference weight below kSupportEps carrying state weight above kWeightEps
// is a genuine support violation rather than round-off.
constexpr double kSupportEps = 1e-14;
constexpr double kWeightEps = 1e-12;

void check_exponent_range(double beta, double lambda_min) {
    if (beta * lambda_min < -700.0) {
        throw OverflowError("partition function: exponent beta*lambda exceeds double range");
    }
}

// −Σ x ln x over entries, skipping x ≤ 0 (validated ≥ −tol upstream).
double entropy_of_weights(const std::vector<double>& w) {
    double s = 0.0;
    for (double x : w)
        if (x > 0.0) s -= x * std::log(x);
    return std::max(s, 0.0);
}

double clamp_nonnegative(double s, const char* what) {
    if (s < -1e-8) throw DomainError(std::string(what) + ": negative beyond tolerance");
    return std::max(s, 0.0);
}

}  // namespace

Temperature::Temperature(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("Temperature: beta must be strictly positive and finite");
    }
}

ClassicalDistribution::ClassicalDistribution(std::vector<double> probs, double tol)
    : p_(std::move(probs)) {
    if (p_.empty()) throw DimMismatchError("ClassicalDistribution: empty");
    double sum = 0.0;
    for (double x : p_) {
        if (x < -tol) throw DomainError("ClassicalDistribution: negative entry beyond tolerance");
        sum += x;
    }
    if (std::abs(sum - 1.0) > std::max(tol, 1e-10)) {
        throw DomainError("ClassicalDistribution: entries do not sum to 1 within tolerance");
    }
}

// ---- quantum functionals ----

double partition_function(const HermitianOperator& h, const Temperature& temp) {
    const auto eig = eigh(h);
    check_exponent_range(temp.beta(), eig.values.front());
    double z = 0.0;
    for (double lam : eig.values) z += std::exp(-temp.beta() * lam);
    return z;
}

double equilibrium_free_energy(const HermitianOperator& h, const Temperature& temp) {
    const auto eig = eigh(h);
    const double lo = eig.values.front();
    check_exponent_range(temp.beta(), lo);
    double zs = 0.0;  // Z e^{+beta lo}
    for (double lam : eig.values) zs += std::exp(-temp.beta() * (lam - lo));
    return lo - temp.T() * std::log(zs);
}

DensityMatrix gibbs_state(const SpectralDecomposition& eig, const Temperature& temp) {
    const double lo = eig.values.front();
    check_exponent_range(temp.beta(), lo);
    double zs = 0.0;
    for (double lam : eig.values) zs += std::exp(-temp.beta() * (lam - lo));
    const ComplexMatrix g = matrix_function(
        eig, [&](double lam) { return std::exp(-temp.beta() * (lam - lo)) / zs; });
    return DensityMatrix(g);
}

DensityMatrix gibbs_state(const HermitianOperator& h, const Temperature& temp) {
    return gibbs_state(eigh(h), temp);
}

double energy(const DensityMatrix& rho, const HermitianOperator& h) {
    return trace_product(rho.matrix(), h.matrix());
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto eig = eigh(HermitianOperator(rho.matrix()));
    return entropy_of_weights(eig.values);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimMismatchError("relative_entropy: dimension mismatch");
    const auto sig = eigh(HermitianOperator(sigma.matrix()));
    const std::size_t n = sigma.dim();

    // Diagonal weights of rho in sigma's eigenbasis: w_k = <v_k|rho|v_k>.
    double cross = 0.0;  // Tr(rho ln sigma)
    for (std::size_t k = 0; k < n; ++k) {
        Complex w{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                w += std::conj(sig.vectors(i, k)) * rho.matrix()(i, j) * sig.vectors(j, k);
        const double wk = std::max(w.real(), 0.0);
        const double sk = sig.values[k];
        if (sk < kSupportEps) {
            if (wk > kWeightEps) return kInf;
            continue;  // negligible weight on a null direction
        }
        cross += wk * std::log(sk);
    }
    const double s = -von_neumann_entropy(rho) - cross;
    return clamp_nonnegative(s, "relative_entropy");
}

double noneq_free_energy(const DensityMatrix& rho, const HermitianOperator& h,
                         const Temperature& temp) {
    if (rho.dim() != h.dim()) throw DimMismatchError("noneq_free_energy: dimension mismatch");
    return energy(rho, h) - temp.T() * von_neumann_entropy(rho);
}

double free_energy_split_residual(const DensityMatrix& rho, const HermitianOperator& h,
                                  const Temperature& temp) {
    if (rho.dim() != h.dim()) {
        throw DimMismatchError("free_energy_split_residual: dimension mismatch");
    }
    const double f1 = noneq_free_energy(rho, h, temp);
    const double f = equilibrium_free_energy(h, temp);
    const double srel = relative_entropy(rho, gibbs_state(h, temp));
    return f1 - f - temp.T() * srel;
}

// ---- classical functionals ----

double kl_divergence(const ClassicalDistribution& p, const ClassicalDistribution& q) {
    if (p.dim() != q.dim()) throw DimMismatchError("kl_divergence: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const double pi = p.probs()[i];
        const double qi = q.probs()[i];
        if (pi <= 0.0) continue;
        if (qi < kSupportEps) {
            if (pi > kWeightEps) return kInf;
            continue;
        }
        s += pi * std::log(pi / qi);
    }
    return clamp_nonnegative(s, "kl_divergence");
}

double shannon_entropy(const ClassicalDistribution& p) { return entropy_of_weights(p.probs()); }

double classical_partition_function(const std::vector<double>& levels, const Temperature& temp) {
    const double lo = *std::min_element(levels.begin(), levels.end());
    check_exponent_range(temp.beta(), lo);
    double z = 0.0;
    for (double e : levels) z += std::exp(-temp.beta() * e);
    return z;
}

double classical_free_energy(const std::vector<double>& levels, const Temperature& temp) {
    const double lo = *std::min_element(levels.begin(), levels.end());
    check_exponent_range(temp.beta(), lo);
    double zs = 0.0;
    for (double e : levels) zs += std::exp(-temp.beta() * (e - lo));
    return lo - temp.T() * std::log(zs);
}

ClassicalDistribution classical_gibbs(const std::vector<double>& levels, const Temperature& temp) {
    const double lo = *std::min_element(levels.begin(), levels.end());
    check_exponent_range(temp.beta(), lo);
    std::vector<double> w(levels.size());
    double zs = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        w[i] = std::exp(-temp.beta() * (levels[i] - lo));
        zs += w[i];
    }
    for (double& x : w) x /= zs;
    return ClassicalDistribution(std::move(w));
}

double classical_energy(const ClassicalDistribution& p, const std::vector<double>& levels) {
    if (p.dim() != levels.size()) throw DimMismatchError("classical_energy: dimension mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) e += p.probs()[i] * levels[i];
    return e;
}

}  // namespace workpen
