#include "workpen/identity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace workpen {

namespace {

constexpr double kDiagTol = 1e-12;

void fill_common(DecompositionReport& rep, const TrajectoryLedger& led, const Temperature& temp) {
    rep.W = led.total_work();
    rep.Sigma = entropy_production(led, temp);
    rep.dS_rel = led.rel_entropy.back() - led.rel_entropy.front();
    rep.W_pn_direct = rep.W - rep.W_qs;
    rep.W_pn_identity = temp.T() * (rep.dS_rel + rep.Sigma);
    rep.identity_residual = rep.W_pn_direct - rep.W_pn_identity;
    rep.first_law_residual = first_law_residual(led);
    rep.dF1 = led.noneq_f.back() - led.noneq_f.front();
}

void check_endpoint(double recomputed, double snapshot, const char* which) {
    if (std::abs(recomputed - snapshot) > 1e-8 * std::max(1.0, std::abs(snapshot))) {
        throw DomainError(std::string("decompose: ") + which +
                          " Hamiltonian does not reproduce the ledger endpoint energy");
    }
}

}  // namespace

double entropy_production(const TrajectoryLedger& ledger, const Temperature& temp) {
    return (ledger.entropy.back() - ledger.entropy.front()) - temp.beta() * ledger.total_heat();
}

DecompositionReport decompose(const TrajectoryLedger& ledger, const HermitianOperator& h_initial,
                              const HermitianOperator& h_final, const Temperature& temp) {
    if (!ledger.quantum || ledger.quantum_states.empty()) {
        throw DomainError("decompose: quantum ledger required for Hamiltonian endpoints");
    }
    check_endpoint(energy(ledger.quantum_states.front(), h_initial), ledger.energy.front(),
                   "initial");
    check_endpoint(energy(ledger.quantum_states.back(), h_final), ledger.energy.back(), "final");
    DecompositionReport rep;
    rep.W_qs = equilibrium_free_energy(h_final, temp) - equilibrium_free_energy(h_initial, temp);
    fill_common(rep, ledger, temp);
    return rep;
}

DecompositionReport decompose(const TrajectoryLedger& ledger,
                              const std::vector<double>& levels_initial,
                              const std::vector<double>& levels_final, const Temperature& temp) {
    if (ledger.quantum || ledger.classical_states.empty()) {
        throw DomainError("decompose: classical ledger required for level endpoints");
    }
    check_endpoint(classical_energy(ledger.classical_states.front(), levels_initial),
                   ledger.energy.front(), "initial");
    check_endpoint(classical_energy(ledger.classical_states.back(), levels_final),
                   ledger.energy.back(), "final");
    DecompositionReport rep;
    rep.W_qs = classical_free_energy(levels_final, temp) - classical_free_energy(levels_initial, temp);
    fill_common(rep, ledger, temp);
    return rep;
}

double diagonal_reduction_check(const QuantumProtocol& qproto, const ClassicalProtocol& cproto,
                                const DensityMatrix& rho0, std::size_t steps) {
    const std::size_t n = qproto.dim();
    if (cproto.dim() != n || rho0.dim() != n) {
        throw DimMismatchError("diagonal_reduction_check: dimension mismatch");
    }
    if (std::abs(qproto.tau() - cproto.tau()) > kDiagTol ||
        std::abs(qproto.temp().beta() - cproto.temp().beta()) > kDiagTol ||
        std::abs(qproto.gamma0() - cproto.gamma()) > kDiagTol) {
        throw NotDiagonalError(
            "diagonal_reduction_check: protocols disagree on duration, temperature, or coupling");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && std::abs(rho0.matrix()(i, j)) > kDiagTol) {
                throw NotDiagonalError("diagonal_reduction_check: initial state is not diagonal");
            }
        }
    }
    // The two drives must agree as piecewise-linear functions: compare on the
    // union of both knot sets.
    std::vector<double> probe;
    for (const auto& [t, m] : qproto.knots()) probe.push_back(t);
    probe.push_back(0.0);
    probe.push_back(cproto.tau());
    for (double t : probe) {
        const ComplexMatrix hq = qproto.hamiltonian_at(t);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && std::abs(hq(i, j)) > kDiagTol) {
                    throw NotDiagonalError(
                        "diagonal_reduction_check: Hamiltonian path is not diagonal");
                }
        const std::vector<double> lc = cproto.levels_at(t);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(hq(i, i).real() - lc[i]) > kDiagTol) {
                throw NotDiagonalError(
                    "diagonal_reduction_check: classical levels differ from the Hamiltonian diagonal");
            }
        }
    }

    std::vector<double> p0(n);
    for (std::size_t i = 0; i < n; ++i) p0[i] = rho0.matrix()(i, i).real();

    const TrajectoryLedger qled = integrate_quantum(qproto, rho0, steps);
    const TrajectoryLedger cled = integrate_classical(
        cproto, ClassicalDistribution(p0, 1e-8), steps);
    const DecompositionReport qrep =
        decompose(qled, HermitianOperator(qproto.hamiltonian_at(0.0)),
                  HermitianOperator(qproto.hamiltonian_at(qproto.tau())), qproto.temp());
    const DecompositionReport crep = decompose(cled, cproto.levels_at(0.0),
                                               cproto.levels_at(cproto.tau()), cproto.temp());

    double d = std::abs(qrep.W - crep.W);
    d = std::max(d, std::abs(qled.total_heat() - cled.total_heat()));
    d = std::max(d, std::abs(qrep.Sigma - crep.Sigma));
    d = std::max(d, std::abs(qrep.dS_rel - crep.dS_rel));
    d = std::max(d, std::abs(qrep.W_pn_direct - crep.W_pn_direct));
    return d;
}

// ---- ramp families ----

ClassicalProtocol ClassicalRampFamily::at_tau(double tau) const {
    std::vector<Schedule> scaled;
    scaled.reserve(unit_schedules.size());
    for (const auto& s : unit_schedules) {
        std::vector<std::pair<double, double>> knots = s.knots();
        for (auto& [t, v] : knots) t *= tau;
        scaled.emplace_back(std::move(knots));
    }
    return ClassicalProtocol(tau, std::move(scaled), gamma, temp);
}

ClassicalDistribution ClassicalRampFamily::initial_state() const {
    if (initial_probs) return ClassicalDistribution(*initial_probs);
    std::vector<double> l0(unit_schedules.size());
    for (std::size_t i = 0; i < unit_schedules.size(); ++i) {
        l0[i] = unit_schedules[i].knots().front().second;
    }
    return classical_gibbs(l0, temp);
}

QuantumProtocol QuantumRampFamily::at_tau(double tau) const {
    std::vector<std::pair<double, ComplexMatrix>> knots = unit_knots;
    for (auto& [t, m] : knots) t *= tau;
    return QuantumProtocol(tau, std::move(knots), gamma0, temp);
}

DensityMatrix QuantumRampFamily::initial_state() const {
    if (initial_state_matrix) return DensityMatrix(*initial_state_matrix);
    return gibbs_state(HermitianOperator(unit_knots.front().second), temp);
}

std::size_t steps_for_tau(double tau, std::size_t steps_per_unit_time) {
    const double raw = tau * static_cast<double>(steps_per_unit_time);
    const auto rounded = static_cast<std::size_t>(std::llround(raw));
    return std::max<std::size_t>(200, rounded);
}

namespace {

void check_taus(const std::vector<double>& taus) {
    if (taus.empty()) throw DomainError("tau_sweep: at least one duration required");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0)) throw DomainError("tau_sweep: durations must be positive");
        if (i > 0 && !(taus[i] > taus[i - 1])) {
            throw DomainError("tau_sweep: durations must be strictly increasing");
        }
    }
}

}  // namespace

SweepResult tau_sweep(const ClassicalRampFamily& family, const std::vector<double>& taus,
                      std::size_t steps_per_unit_time) {
    check_taus(taus);
    SweepResult out;
    out.taus = taus;
    for (double tau : taus) {
        const ClassicalProtocol proto = family.at_tau(tau);
        const TrajectoryLedger led =
            integrate_classical(proto, family.initial_state(), steps_for_tau(tau, steps_per_unit_time));
        out.reports.push_back(
            decompose(led, proto.levels_at(0.0), proto.levels_at(tau), proto.temp()));
    }
    return out;
}

SweepResult tau_sweep(const QuantumRampFamily& family, const std::vector<double>& taus,
                      std::size_t steps_per_unit_time) {
    check_taus(taus);
    SweepResult out;
    out.taus = taus;
    for (double tau : taus) {
        const QuantumProtocol proto = family.at_tau(tau);
        const TrajectoryLedger led =
            integrate_quantum(proto, family.initial_state(), steps_for_tau(tau, steps_per_unit_time));
        out.reports.push_back(decompose(led, HermitianOperator(proto.hamiltonian_at(0.0)),
                                        HermitianOperator(proto.hamiltonian_at(tau)),
                                        proto.temp()));
    }
    return out;
}

// ---- simplex optimizer ----

OptimizationResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                               std::vector<double> x0,
                               const std::vector<std::pair<double, double>>& bounds,
                               std::size_t budget) {
    const std::size_t n = x0.size();
    if (budget < 1) throw DomainError("nelder_mead: budget must be at least 1");
    if (bounds.size() != n) throw DimMismatchError("nelder_mead: one bound pair per parameter");
    for (const auto& [lo, hi] : bounds) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
            throw DomainError("nelder_mead: bounds must be finite intervals");
        }
    }
    const auto clamp = [&](std::vector<double> x) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = std::min(std::max(x[i], bounds[i].first), bounds[i].second);
        }
        return x;
    };
    x0 = clamp(std::move(x0));

    OptimizationResult res;
    std::size_t evals = 0;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> best_x = x0;
    const auto eval = [&](const std::vector<double>& x) {
        const double v = objective(x);
        ++evals;
        if (v < best_f) {  // strict: ties keep the earliest point
            best_f = v;
            best_x = x;
        }
        return v;
    };

    if (n == 0) {
        best_f = eval(x0);
        res.best_parameters = best_x;
        res.best_W_pn = best_f;
        res.evaluations = evals;
        res.converged = true;
        return res;
    }

    // Initial simplex: x0 plus one 10%-of-range step per coordinate, flipped
    // when it would leave the box.
    std::vector<std::vector<double>> xs{x0};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = x0;
        const double h = 0.1 * (bounds[i].second - bounds[i].first);
        double stepped = std::min(v[i] + h, bounds[i].second);
        if (stepped == v[i]) stepped = std::max(v[i] - h, bounds[i].first);
        v[i] = stepped;
        xs.push_back(std::move(v));
    }
    std::vector<double> fs(n + 1, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j <= n && evals < budget; ++j) fs[j] = eval(xs[j]);
    bool exhausted = evals >= budget;

    bool converged = false;
    while (!exhausted) {
        // Ascending by value, index as deterministic tie-break.
        std::vector<std::size_t> order(n + 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> xs2(n + 1);
        std::vector<double> fs2(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            xs2[j] = xs[order[j]];
            fs2[j] = fs[order[j]];
        }
        xs = std::move(xs2);
        fs = std::move(fs2);

        double diameter = 0.0;
        for (std::size_t j = 1; j <= n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                diameter = std::max(diameter, std::abs(xs[j][i] - xs[0][i]));
        if (diameter < 1e-4) {
            converged = true;
            break;
        }
        if (evals >= budget) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += xs[j][i] / static_cast<double>(n);

        const auto line = [&](double c) {  // centroid + c·(centroid − worst)
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + c * (centroid[i] - xs[n][i]);
            return clamp(std::move(x));
        };
        const auto accept = [&](std::vector<double> x, double fx) {
            xs[n] = std::move(x);
            fs[n] = fx;
        };

        const std::vector<double> xr = line(1.0);
        const double fr = eval(xr);
        if (evals >= budget) {
            exhausted = true;
            break;
        }
        if (fr < fs[0]) {
            const std::vector<double> xe = line(2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                accept(xe, fe);
            } else {
                accept(xr, fr);
            }
        } else if (fr < fs[n - 1]) {
            accept(xr, fr);
        } else {
            bool shrink = false;
            if (fr < fs[n]) {
                const std::vector<double> xc = line(0.5);
                const double fc = eval(xc);
                if (fc <= fr) {
                    accept(xc, fc);
                } else {
                    shrink = true;
                }
            } else {
                const std::vector<double> xc = line(-0.5);
                const double fc = eval(xc);
                if (fc < fs[n]) {
                    accept(xc, fc);
                } else {
                    shrink = true;
                }
            }
            if (shrink) {
                for (std::size_t j = 1; j <= n && !exhausted; ++j) {
                    for (std::size_t i = 0; i < n; ++i) {
                        xs[j][i] = xs[0][i] + 0.5 * (xs[j][i] - xs[0][i]);
                    }
                    if (evals >= budget) {
                        exhausted = true;
                        break;
                    }
                    fs[j] = eval(xs[j]);
                }
            }
        }
        if (evals >= budget) exhausted = true;
    }

    res.best_parameters = best_x;
    res.best_W_pn = best_f;
    res.evaluations = evals;
    res.converged = converged;
    return res;
}

// ---- protocol optimization over interior knot values ----

namespace {

std::vector<double> classical_interior_values(const ClassicalRampFamily& family) {
    std::vector<double> vals;
    for (const auto& s : family.unit_schedules) {
        for (std::size_t k = 1; k + 1 < s.knots().size(); ++k) vals.push_back(s.knots()[k].second);
    }
    return vals;
}

ClassicalRampFamily classical_with_values(const ClassicalRampFamily& family,
                                          const std::vector<double>& vals) {
    ClassicalRampFamily out = family;
    std::vector<Schedule> rebuilt;
    std::size_t idx = 0;
    for (const auto& s : family.unit_schedules) {
        std::vector<std::pair<double, double>> knots = s.knots();
        for (std::size_t k = 1; k + 1 < knots.size(); ++k) knots[k].second = vals[idx++];
        rebuilt.emplace_back(std::move(knots));
    }
    out.unit_schedules = std::move(rebuilt);
    return out;
}

// Independent Hermitian entries of one interior knot: the N diagonal reals,
// then (re, im) for each upper off-diagonal entry in row-major order.
std::vector<double> quantum_interior_values(const QuantumRampFamily& family) {
    std::vector<double> vals;
    const std::size_t n = family.unit_knots.front().second.dim();
    for (std::size_t k = 1; k + 1 < family.unit_knots.size(); ++k) {
        const ComplexMatrix& m = family.unit_knots[k].second;
        for (std::size_t i = 0; i < n; ++i) vals.push_back(m(i, i).real());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                vals.push_back(m(i, j).real());
                vals.push_back(m(i, j).imag());
            }
    }
    return vals;
}

QuantumRampFamily quantum_with_values(const QuantumRampFamily& family,
                                      const std::vector<double>& vals) {
    QuantumRampFamily out = family;
    const std::size_t n = family.unit_knots.front().second.dim();
    std::size_t idx = 0;
    for (std::size_t k = 1; k + 1 < out.unit_knots.size(); ++k) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = vals[idx++];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double re = vals[idx++];
                const double im = vals[idx++];
                m(i, j) = Complex(re, im);
                m(j, i) = Complex(re, -im);
            }
        out.unit_knots[k].second = m;
    }
    return out;
}

}  // namespace

OptimizationResult optimize_protocol(const ClassicalRampFamily& family, double tau,
                                     const std::vector<std::pair<double, double>>& bounds,
                                     std::size_t budget, std::size_t steps_per_unit_time) {
    const std::vector<double> x0 = classical_interior_values(family);
    if (bounds.size() != x0.size()) {
        throw DimMismatchError("optimize_protocol: one bound pair per interior knot value");
    }
    const std::size_t steps = steps_for_tau(tau, steps_per_unit_time);
    const auto objective = [&, tau, steps](const std::vector<double>& x) {
        const ClassicalRampFamily fam = classical_with_values(family, x);
        const ClassicalProtocol proto = fam.at_tau(tau);
        const TrajectoryLedger led = integrate_classical(proto, fam.initial_state(), steps);
        return decompose(led, proto.levels_at(0.0), proto.levels_at(tau), proto.temp()).W_pn_direct;
    };
    return nelder_mead(objective, x0, bounds, budget);
}

OptimizationResult optimize_protocol(const QuantumRampFamily& family, double tau,
                                     const std::vector<std::pair<double, double>>& bounds,
                                     std::size_t budget, std::size_t steps_per_unit_time) {
    const std::vector<double> x0 = quantum_interior_values(family);
    if (bounds.size() != x0.size()) {
        throw DimMismatchError(
            "optimize_protocol: one bound pair per interior Hermitian entry component");
    }
    const std::size_t steps = steps_for_tau(tau, steps_per_unit_time);
    const auto objective = [&, tau, steps](const std::vector<double>& x) {
        const QuantumRampFamily fam = quantum_with_values(family, x);
        const QuantumProtocol proto = fam.at_tau(tau);
        const TrajectoryLedger led = integrate_quantum(proto, fam.initial_state(), steps);
        return decompose(led, HermitianOperator(proto.hamiltonian_at(0.0)),
                         HermitianOperator(proto.hamiltonian_at(tau)), proto.temp())
            .W_pn_direct;
    };
    return nelder_mead(objective, x0, bounds, budget);
}

}  // namespace workpen
