#include "workpen/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace workpen {

// ---- schedules and protocols ----

Schedule::Schedule(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw DomainError("Schedule: at least two knots required");
    if (knots_.front().first != 0.0) throw DomainError("Schedule: first knot must sit at t = 0");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i].first < knots_[i + 1].first)) {
            throw DomainError("Schedule: knot times must be strictly increasing");
        }
    }
    for (const auto& [t, v] : knots_) {
        if (!std::isfinite(t) || !std::isfinite(v)) throw DomainError("Schedule: non-finite knot");
    }
}

namespace {

// Shared beyond-the-ends slack: times within round-off of the domain edges
// are clamped rather than rejected.
double clamp_into(double t, double lo, double hi) {
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    if (t < lo - slack || t > hi + slack) {
        throw OutOfRangeError("sample time outside the schedule domain");
    }
    return std::min(std::max(t, lo), hi);
}

}  // namespace

double sample_schedule(const Schedule& s, double t) {
    const auto& ks = s.knots();
    t = clamp_into(t, ks.front().first, ks.back().first);
    // Exact at knots by direct lookup.
    for (const auto& [tk, vk] : ks)
        if (t == tk) return vk;
    std::size_t hi = 1;
    while (ks[hi].first < t) ++hi;
    const auto& [ta, va] = ks[hi - 1];
    const auto& [tb, vb] = ks[hi];
    const double theta = (t - ta) / (tb - ta);
    return va + (vb - va) * theta;
}

ClassicalProtocol::ClassicalProtocol(double tau, std::vector<Schedule> level_schedules,
                                     double gamma, Temperature temp)
    : tau_(tau), levels_(std::move(level_schedules)), gamma_(gamma), temp_(temp) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("ClassicalProtocol: tau must be positive");
    if (levels_.size() < 2) throw DomainError("ClassicalProtocol: at least two levels required");
    for (const auto& s : levels_) {
        if (s.end_time() != tau_) {
            throw DomainError("ClassicalProtocol: every schedule must end at tau");
        }
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("ClassicalProtocol: coupling must be positive and finite");
    }
}

std::vector<double> ClassicalProtocol::levels_at(double t) const {
    std::vector<double> out(levels_.size());
    for (std::size_t i = 0; i < levels_.size(); ++i) out[i] = sample_schedule(levels_[i], t);
    return out;
}

QuantumProtocol::QuantumProtocol(double tau,
                                 std::vector<std::pair<double, ComplexMatrix>> hamiltonian_knots,
                                 double gamma0, Temperature temp)
    : tau_(tau), knots_(std::move(hamiltonian_knots)), gamma0_(gamma0), temp_(temp) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("QuantumProtocol: tau must be positive");
    if (knots_.size() < 2) throw DomainError("QuantumProtocol: at least two Hamiltonian knots required");
    if (knots_.front().first != 0.0) {
        throw DomainError("QuantumProtocol: first Hamiltonian knot must sit at t = 0");
    }
    if (knots_.back().first != tau_) {
        throw DomainError("QuantumProtocol: last Hamiltonian knot must sit at t = tau");
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i].first < knots_[i + 1].first)) {
            throw DomainError("QuantumProtocol: knot times must be strictly increasing");
        }
    }
    dim_ = knots_.front().second.dim();
    for (auto& [t, m] : knots_) {
        if (m.dim() != dim_) throw DimMismatchError("QuantumProtocol: knot dimensions differ");
        m = HermitianOperator(m).matrix();  // validates hermiticity, stores symmetrized
    }
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
        throw DomainError("QuantumProtocol: coupling must be positive and finite");
    }
}

ComplexMatrix QuantumProtocol::hamiltonian_at(double t) const {
    t = clamp_into(t, 0.0, tau_);
    for (const auto& [tk, mk] : knots_)
        if (t == tk) return mk;
    std::size_t hi = 1;
    while (knots_[hi].first < t) ++hi;
    const auto& [ta, ma] = knots_[hi - 1];
    const auto& [tb, mb] = knots_[hi];
    const double theta = (t - ta) / (tb - ta);
    return (ma * Complex(1.0 - theta) + mb * Complex(theta)).symmetrized();
}

// ---- generators ----

std::vector<double> classical_rate_matrix(const std::vector<double>& levels,
                                          const Temperature& temp, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("classical_rate_matrix: coupling must be positive and finite");
    }
    const std::size_t n = levels.size();
    const double beta = temp.beta();
    std::vector<double> r(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double out = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            // jump j -> i, acceptance-weighted toward lower energy
            const double w =
                levels[i] <= levels[j] ? gamma : gamma * std::exp(-beta * (levels[i] - levels[j]));
            r[i * n + j] = w;
            out += w;
        }
        r[j * n + j] = -out;
    }
    return r;
}

namespace {

constexpr double kMinGap = 1e-9;
constexpr double kStateTol = 1e-8;  // simplex / positivity drift allowed per trajectory

struct LindbladEval {
    ComplexMatrix rhs;  // full generator, lab frame
    double heat_rate;   // Tr(D(ρ)H)
};

// Generator in the eigenbasis of H: unitary part −i(λ_x − λ_y)ρ̃_xy plus the
// thermal dissipator (pairwise population exchange at rates Γ₀·min(1, e^{−βω});
// coherences decay at half the summed outflow rates).
LindbladEval lindblad_apply(const SpectralDecomposition& eig, double beta, double gamma0,
                            const ComplexMatrix& rho_lab) {
    const std::size_t n = eig.values.size();
    for (std::size_t a = 0; a + 1 < n; ++a) {
        if (eig.values[a + 1] - eig.values[a] < kMinGap) {
            throw DegenerateSpectrumError(
                "lindblad generator: instantaneous spectrum has a gap below 1e-9");
        }
    }
    const ComplexMatrix vdag = eig.vectors.adjoint();
    const ComplexMatrix rt = vdag * rho_lab * eig.vectors;

    std::vector<double> rate(n * n, 0.0);  // rate[a*n+b]: transition a -> b
    std::vector<double> outflow(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const double w = eig.values[b] < eig.values[a]
                                 ? gamma0
                                 : gamma0 * std::exp(-beta * (eig.values[b] - eig.values[a]));
            rate[a * n + b] = w;
            outflow[a] += w;
        }
    }

    ComplexMatrix f(n);
    double heat = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        double gain = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            if (b != a) gain += rate[b * n + a] * rt(b, b).real();
        }
        const double daa = gain - outflow[a] * rt(a, a).real();
        f(a, a) = daa;
        heat += eig.values[a] * daa;
    }
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            const double decay = 0.5 * (outflow[x] + outflow[y]);
            const double omega = eig.values[x] - eig.values[y];
            f(x, y) = Complex(-decay, -omega) * rt(x, y);
        }
    }
    return {(eig.vectors * f * vdag).symmetrized(), heat};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> mat_vec(const std::vector<double>& r, const std::vector<double>& p) {
    const std::size_t n = p.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += r[i * n + j] * p[j];
    return out;
}

std::vector<double> axpy(const std::vector<double>& p, double c, const std::vector<double>& d) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + c * d[i];
    return out;
}

}  // namespace

// ---- integrators ----

TrajectoryLedger integrate_classical(const ClassicalProtocol& proto,
                                     const ClassicalDistribution& p0, std::size_t steps) {
    if (steps < 1) throw DomainError("integrate_classical: steps must be at least 1");
    if (p0.dim() != proto.dim()) throw DimMismatchError("integrate_classical: dimension mismatch");
    const std::size_t n = proto.dim();
    const std::size_t s = steps;
    const double tau = proto.tau();
    const Temperature& temp = proto.temp();
    const double T = temp.T();

    // Sample the drive once on the grid and step midpoints; all level
    // derivatives come from these samples (central differences at interior
    // grid points, second-order one-sided at the ends, secants at midpoints).
    std::vector<double> tg(s + 1), tm(s);
    std::vector<std::vector<double>> lg(s + 1), lm(s);
    for (std::size_t k = 0; k <= s; ++k) {
        tg[k] = tau * (static_cast<double>(k) / static_cast<double>(s));
        lg[k] = proto.levels_at(tg[k]);
    }
    for (std::size_t k = 0; k < s; ++k) {
        tm[k] = tg[k] + 0.5 * (tg[k + 1] - tg[k]);
        lm[k] = proto.levels_at(tm[k]);
    }
    std::vector<std::vector<double>> dg(s + 1, std::vector<double>(n)), dm(s, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        dg[0][i] = (-3.0 * lg[0][i] + 4.0 * lm[0][i] - lg[1][i]) / (2.0 * (tm[0] - tg[0]));
        dg[s][i] = (3.0 * lg[s][i] - 4.0 * lm[s - 1][i] + lg[s - 1][i]) / (2.0 * (tg[s] - tm[s - 1]));
    }
    for (std::size_t k = 1; k < s; ++k)
        for (std::size_t i = 0; i < n; ++i)
            dg[k][i] = (lm[k][i] - lm[k - 1][i]) / (tm[k] - tm[k - 1]);
    for (std::size_t k = 0; k < s; ++k)
        for (std::size_t i = 0; i < n; ++i)
            dm[k][i] = (lg[k + 1][i] - lg[k][i]) / (tg[k + 1] - tg[k]);

    TrajectoryLedger led;
    led.quantum = false;
    const auto record = [&](std::size_t k, const ClassicalDistribution& state, double w, double q) {
        const double e = classical_energy(state, lg[k]);
        const double s1 = shannon_entropy(state);
        led.times.push_back(tg[k]);
        led.work.push_back(w);
        led.heat.push_back(q);
        led.energy.push_back(e);
        led.entropy.push_back(s1);
        led.noneq_f.push_back(e - T * s1);
        led.rel_entropy.push_back(kl_divergence(state, classical_gibbs(lg[k], temp)));
        led.classical_states.push_back(state);
    };

    std::vector<double> p = p0.probs();
    std::vector<double> rk = classical_rate_matrix(lg[0], temp, proto.gamma());
    std::vector<double> d1 = mat_vec(rk, p);
    double w_cum = 0.0, q_cum = 0.0;
    record(0, p0, w_cum, q_cum);
    double wdot_prev = dot(p, dg[0]);
    double qdot_prev = dot(lg[0], d1);

    for (std::size_t k = 0; k < s; ++k) {
        const double dt = tg[k + 1] - tg[k];
        const std::vector<double> rm = classical_rate_matrix(lm[k], temp, proto.gamma());
        const std::vector<double> r1 = classical_rate_matrix(lg[k + 1], temp, proto.gamma());
        const std::vector<double>& k1 = d1;
        const std::vector<double> k2 = mat_vec(rm, axpy(p, 0.5 * dt, k1));
        const std::vector<double> k3 = mat_vec(rm, axpy(p, 0.5 * dt, k2));
        const std::vector<double> k4 = mat_vec(r1, axpy(p, dt, k3));
        std::vector<double> p_next(n);
        for (std::size_t i = 0; i < n; ++i) {
            p_next[i] = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        std::unique_ptr<ClassicalDistribution> state;
        try {
            state = std::make_unique<ClassicalDistribution>(p_next, kStateTol);
        } catch (const DomainError&) {
            throw StepTooLargeError(
                "integrate_classical: step left the probability simplex; increase steps");
        }
        const std::vector<double> d1n = mat_vec(r1, p_next);
        std::vector<double> p_mid(n);
        for (std::size_t i = 0; i < n; ++i) {
            p_mid[i] = 0.5 * (p[i] + p_next[i]) + dt / 8.0 * (k1[i] - d1n[i]);
        }
        const std::vector<double> pdot_mid = mat_vec(rm, p_mid);
        const double wdot_mid = dot(p_mid, dm[k]);
        const double qdot_mid = dot(lm[k], pdot_mid);
        const double wdot_next = dot(p_next, dg[k + 1]);
        const double qdot_next = dot(lg[k + 1], d1n);
        w_cum += dt / 6.0 * (wdot_prev + 4.0 * wdot_mid + wdot_next);
        q_cum += dt / 6.0 * (qdot_prev + 4.0 * qdot_mid + qdot_next);
        record(k + 1, *state, w_cum, q_cum);
        p = p_next;
        d1 = d1n;
        wdot_prev = wdot_next;
        qdot_prev = qdot_next;
    }
    return led;
}

TrajectoryLedger integrate_quantum(const QuantumProtocol& proto, const DensityMatrix& rho0,
                                   std::size_t steps) {
    if (steps < 1) throw DomainError("integrate_quantum: steps must be at least 1");
    if (rho0.dim() != proto.dim()) throw DimMismatchError("integrate_quantum: dimension mismatch");
    const std::size_t s = steps;
    const double tau = proto.tau();
    const Temperature& temp = proto.temp();
    const double beta = temp.beta();
    const double T = temp.T();
    const double g0 = proto.gamma0();

    std::vector<double> tg(s + 1), tm(s);
    std::vector<ComplexMatrix> hg(s + 1), hm(s);
    for (std::size_t k = 0; k <= s; ++k) {
        tg[k] = tau * (static_cast<double>(k) / static_cast<double>(s));
        hg[k] = proto.hamiltonian_at(tg[k]);
    }
    for (std::size_t k = 0; k < s; ++k) {
        tm[k] = tg[k] + 0.5 * (tg[k + 1] - tg[k]);
        hm[k] = proto.hamiltonian_at(tm[k]);
    }
    std::vector<ComplexMatrix> dg(s + 1), dm(s);
    dg[0] = ((hg[0] * Complex(-3.0) + hm[0] * Complex(4.0) - hg[1]) *
             Complex(1.0 / (2.0 * (tm[0] - tg[0]))))
                .symmetrized();
    dg[s] = ((hg[s] * Complex(3.0) - hm[s - 1] * Complex(4.0) + hg[s - 1]) *
             Complex(1.0 / (2.0 * (tg[s] - tm[s - 1]))))
                .symmetrized();
    for (std::size_t k = 1; k < s; ++k) {
        dg[k] = ((hm[k] - hm[k - 1]) * Complex(1.0 / (tm[k] - tm[k - 1]))).symmetrized();
    }
    for (std::size_t k = 0; k < s; ++k) {
        dm[k] = ((hg[k + 1] - hg[k]) * Complex(1.0 / (tg[k + 1] - tg[k]))).symmetrized();
    }

    TrajectoryLedger led;
    led.quantum = true;
    const auto record = [&](std::size_t k, const DensityMatrix& state,
                            const SpectralDecomposition& eig_h, double w, double q) {
        const double e = trace_product(state.matrix(), hg[k]);
        const double s1 = von_neumann_entropy(state);
        led.times.push_back(tg[k]);
        led.work.push_back(w);
        led.heat.push_back(q);
        led.energy.push_back(e);
        led.entropy.push_back(s1);
        led.noneq_f.push_back(e - T * s1);
        led.rel_entropy.push_back(relative_entropy(state, gibbs_state(eig_h, temp)));
        led.quantum_states.push_back(state);
    };

    ComplexMatrix rho = rho0.matrix();
    SpectralDecomposition eig0 = eigh(HermitianOperator(hg[0]));
    LindbladEval d1 = lindblad_apply(eig0, beta, g0, rho);
    double w_cum = 0.0, q_cum = 0.0;
    record(0, rho0, eig0, w_cum, q_cum);
    double wdot_prev = trace_product(rho, dg[0]);

    for (std::size_t k = 0; k < s; ++k) {
        const double dt = tg[k + 1] - tg[k];
        const SpectralDecomposition eig_m = eigh(HermitianOperator(hm[k]));
        const SpectralDecomposition eig_1 = eigh(HermitianOperator(hg[k + 1]));
        const ComplexMatrix& k1 = d1.rhs;
        const ComplexMatrix k2 =
            lindblad_apply(eig_m, beta, g0, rho + k1 * Complex(0.5 * dt)).rhs;
        const ComplexMatrix k3 =
            lindblad_apply(eig_m, beta, g0, rho + k2 * Complex(0.5 * dt)).rhs;
        const ComplexMatrix k4 = lindblad_apply(eig_1, beta, g0, rho + k3 * Complex(dt)).rhs;
        const ComplexMatrix rho_next =
            rho + (k1 + k2 * Complex(2.0) + k3 * Complex(2.0) + k4) * Complex(dt / 6.0);
        std::unique_ptr<DensityMatrix> state;
        try {
            state = std::make_unique<DensityMatrix>(rho_next, kStateTol);
        } catch (const NotADensityMatrixError&) {
            throw StepTooLargeError(
                "integrate_quantum: step left the density-matrix set; increase steps");
        }
        const LindbladEval d1n = lindblad_apply(eig_1, beta, g0, rho_next);
        const ComplexMatrix rho_mid =
            (rho + rho_next) * Complex(0.5) + (k1 - d1n.rhs) * Complex(dt / 8.0);
        const LindbladEval mid = lindblad_apply(eig_m, beta, g0, rho_mid);
        const double wdot_mid = trace_product(rho_mid, dm[k]);
        const double wdot_next = trace_product(rho_next, dg[k + 1]);
        w_cum += dt / 6.0 * (wdot_prev + 4.0 * wdot_mid + wdot_next);
        q_cum += dt / 6.0 * (d1.heat_rate + 4.0 * mid.heat_rate + d1n.heat_rate);
        record(k + 1, *state, eig_1, w_cum, q_cum);
        rho = rho_next;
        d1 = d1n;
        wdot_prev = wdot_next;
    }
    return led;
}

ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const HermitianOperator& h,
                           const Temperature& temp, double gamma0) {
    if (rho.dim() != h.dim()) throw DimMismatchError("lindblad_rhs: dimension mismatch");
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
        throw DomainError("lindblad_rhs: coupling must be positive and finite");
    }
    return lindblad_apply(eigh(h), temp.beta(), gamma0, rho.matrix()).rhs;
}

// ---- ledger diagnostics ----

double first_law_residual(const TrajectoryLedger& ledger) {
    return (ledger.energy.back() - ledger.energy.front()) - ledger.total_work() -
           ledger.total_heat();
}

double first_law_residual(const TrajectoryLedger& ledger, const HermitianOperator& h_initial,
                          const HermitianOperator& h_final) {
    const double e0 = energy(ledger.quantum_states.front(), h_initial);
    const double e1 = energy(ledger.quantum_states.back(), h_final);
    return (e1 - e0) - ledger.total_work() - ledger.total_heat();
}

double first_law_residual(const TrajectoryLedger& ledger,
                          const std::vector<double>& levels_initial,
                          const std::vector<double>& levels_final) {
    const double e0 = classical_energy(ledger.classical_states.front(), levels_initial);
    const double e1 = classical_energy(ledger.classical_states.back(), levels_final);
    return (e1 - e0) - ledger.total_work() - ledger.total_heat();
}

double first_law_tolerance(std::size_t steps) {
    const double ratio = 2000.0 / static_cast<double>(steps);
    return 1e-6 * ratio * ratio;
}

}  // namespace workpen
