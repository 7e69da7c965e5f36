#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "workpen/identity.hpp"

using namespace workpen;

namespace {

ComplexMatrix diag(const std::vector<double>& v) {
    ComplexMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
    return m;
}

// the bundled reset shape on the unit interval
ClassicalRampFamily reset_family(double gamma = 1.0, double beta = 1.0) {
    std::vector<Schedule> s;
    s.emplace_back(Schedule({{0.0, 0.0}, {1.0, 0.0}}));
    s.emplace_back(Schedule({{0.0, 0.01}, {1.0, 4.0}}));
    return ClassicalRampFamily{std::move(s), gamma, Temperature(beta), {}};
}

// same shape with a free mid knot on the raised level (the flat level keeps
// two knots so the mid value is the only optimization parameter)
ClassicalRampFamily reset_family_mid(double mid) {
    std::vector<Schedule> s;
    s.emplace_back(Schedule({{0.0, 0.0}, {1.0, 0.0}}));
    s.emplace_back(Schedule({{0.0, 0.01}, {0.5, mid}, {1.0, 4.0}}));
    return ClassicalRampFamily{std::move(s), 1.0, Temperature(1.0), {}};
}

const double kLn2 = std::log(2.0);

}  // namespace

TEST_CASE("entropy_production from ledger snapshots") {
    // static equilibrium: nothing is produced
    std::vector<Schedule> s;
    s.emplace_back(Schedule({{0.0, 0.0}, {2.0, 0.0}}));
    s.emplace_back(Schedule({{0.0, 1.0}, {2.0, 1.0}}));
    const ClassicalProtocol staticp(2.0, std::move(s), 1.0, Temperature(1.0));
    const auto g = classical_gibbs({0.0, 1.0}, Temperature(1.0));
    const TrajectoryLedger still = integrate_classical(staticp, g, 500);
    CHECK(std::abs(entropy_production(still, Temperature(1.0))) <= 1e-10);

    // relaxation: strictly positive, equals ΔS₁ − βQ
    std::vector<Schedule> s2;
    s2.emplace_back(Schedule({{0.0, 0.0}, {20.0, 0.0}}));
    s2.emplace_back(Schedule({{0.0, 1.0}, {20.0, 1.0}}));
    const ClassicalProtocol relaxp(20.0, std::move(s2), 1.0, Temperature(1.0));
    const TrajectoryLedger relax =
        integrate_classical(relaxp, ClassicalDistribution({0.0, 1.0}), 2000);
    const double sigma = entropy_production(relax, Temperature(1.0));
    CHECK(sigma > 0.0);
    CHECK(std::abs(sigma - ((relax.entropy.back() - relax.entropy.front()) -
                            relax.total_heat())) <= 1e-15);
}

TEST_CASE("decompose: static equilibrium reports zeros") {
    std::vector<Schedule> s;
    s.emplace_back(Schedule({{0.0, 0.0}, {2.0, 0.0}}));
    s.emplace_back(Schedule({{0.0, 1.0}, {2.0, 1.0}}));
    const ClassicalProtocol proto(2.0, std::move(s), 1.0, Temperature(1.0));
    const auto g = classical_gibbs({0.0, 1.0}, Temperature(1.0));
    const TrajectoryLedger led = integrate_classical(proto, g, 500);
    const DecompositionReport rep =
        decompose(led, {0.0, 1.0}, {0.0, 1.0}, Temperature(1.0));

    CHECK(std::abs(rep.W) <= 1e-9);
    CHECK(std::abs(rep.W_qs) <= 1e-9);
    CHECK(std::abs(rep.W_pn_direct) <= 1e-9);
    CHECK(std::abs(rep.Sigma) <= 1e-9);
    CHECK(std::abs(rep.dS_rel) <= 1e-9);
    CHECK(std::abs(rep.identity_residual) <= 1e-9);
    CHECK(std::abs(rep.first_law_residual) <= 1e-9);
    CHECK(std::abs(rep.dF1) <= 1e-9);
}

TEST_CASE("decompose: two work-penalty paths agree on a driven ramp") {
    const auto fam = reset_family();
    const double tau = 5.0;
    const ClassicalProtocol proto = fam.at_tau(tau);
    const TrajectoryLedger led = integrate_classical(proto, fam.initial_state(), 2000);
    const DecompositionReport rep =
        decompose(led, proto.levels_at(0.0), proto.levels_at(tau), Temperature(1.0));

    CHECK(rep.W_pn_direct == rep.W - rep.W_qs);
    CHECK(std::abs(rep.W_pn_identity - (rep.dS_rel + rep.Sigma)) <= 1e-15);  // T = 1
    CHECK(std::abs(rep.identity_residual) <=
          std::max(1e-6, 10.0 * std::abs(rep.first_law_residual)));
    CHECK(std::abs(rep.identity_residual) <= 1e-6);
    CHECK(rep.Sigma >= -1e-8);
    CHECK(rep.W_pn_direct >= -1e-7);  // equilibrium start
    // W_qs = ΔF by definition
    const double dF = classical_free_energy({0.0, 4.0}, Temperature(1.0)) -
                      classical_free_energy({0.0, 0.01}, Temperature(1.0));
    CHECK(std::abs(rep.W_qs - dF) <= 1e-12);

    // endpoint mismatch is rejected
    CHECK_THROWS_AS(decompose(led, proto.levels_at(0.0), {0.0, 3.0}, Temperature(1.0)),
                    DomainError);
}

TEST_CASE("decompose: quantum ramp satisfies the identity contract") {
    ComplexMatrix h0(2), h1(2);
    h0(0, 1) = 0.3;
    h0(1, 0) = 0.3;
    h0(1, 1) = 1.0;
    h1(0, 1) = Complex{0.1, 0.2};
    h1(1, 0) = Complex{0.1, -0.2};
    h1(1, 1) = 1.5;
    const QuantumProtocol proto(2.0, {{0.0, h0}, {2.0, h1}}, 0.8, Temperature(1.0));
    const DensityMatrix rho0 = gibbs_state(HermitianOperator(h0), Temperature(1.0));
    const TrajectoryLedger led = integrate_quantum(proto, rho0, 2000);
    const DecompositionReport rep = decompose(led, HermitianOperator(h0), HermitianOperator(h1),
                                              Temperature(1.0));

    CHECK(std::abs(rep.identity_residual) <=
          std::max(1e-6, 10.0 * std::abs(rep.first_law_residual)));
    CHECK(std::abs(rep.identity_residual) <= 1e-6);
    CHECK(rep.Sigma >= -1e-8);
    CHECK(rep.W_pn_direct >= -1e-7);
    CHECK(std::abs(rep.dF1 - (led.noneq_f.back() - led.noneq_f.front())) <= 1e-15);
}

TEST_CASE("entropy-valued fields are invariant under the scaling group") {
    // classical: β → 2β, all levels halved, same drive in time
    std::vector<Schedule> a1, a2;
    a1.emplace_back(Schedule({{0.0, 0.0}, {3.0, 0.2}}));
    a1.emplace_back(Schedule({{0.0, 0.5}, {3.0, 2.0}}));
    a2.emplace_back(Schedule({{0.0, 0.0}, {3.0, 0.1}}));
    a2.emplace_back(Schedule({{0.0, 0.25}, {3.0, 1.0}}));
    const ClassicalProtocol p1(3.0, std::move(a1), 1.0, Temperature(1.0));
    const ClassicalProtocol p2(3.0, std::move(a2), 1.0, Temperature(2.0));
    const auto led1 = integrate_classical(p1, classical_gibbs({0.0, 0.5}, Temperature(1.0)), 1000);
    const auto led2 = integrate_classical(p2, classical_gibbs({0.0, 0.25}, Temperature(2.0)), 1000);
    const auto r1 = decompose(led1, {0.0, 0.5}, {0.2, 2.0}, Temperature(1.0));
    const auto r2 = decompose(led2, {0.0, 0.25}, {0.1, 1.0}, Temperature(2.0));
    CHECK(std::abs(r1.Sigma - r2.Sigma) <= 1e-9);
    CHECK(std::abs(r1.dS_rel - r2.dS_rel) <= 1e-9);

    // quantum needs time rescaled too (ħ = 1couples H to the clock):
    // H → H/2, β → 2β, τ → 2τ, Γ → Γ/2
    ComplexMatrix h0(2), h1(2);
    h0(0, 1) = 0.3;
    h0(1, 0) = 0.3;
    h0(1, 1) = 1.0;
    h1(0, 1) = 0.15;
    h1(1, 0) = 0.15;
    h1(1, 1) = 1.4;
    const QuantumProtocol q1(2.0, {{0.0, h0}, {2.0, h1}}, 0.8, Temperature(1.0));
    const QuantumProtocol q2(4.0,
                             {{0.0, h0 * Complex{0.5, 0.0}}, {4.0, h1 * Complex{0.5, 0.0}}},
                             0.4, Temperature(2.0));
    const auto lq1 = integrate_quantum(q1, gibbs_state(HermitianOperator(h0), Temperature(1.0)),
                                       1000);
    const auto lq2 = integrate_quantum(
        q2, gibbs_state(HermitianOperator(h0 * Complex{0.5, 0.0}), Temperature(2.0)), 1000);
    const auto rq1 = decompose(lq1, HermitianOperator(h0), HermitianOperator(h1),
                               Temperature(1.0));
    const auto rq2 = decompose(lq2, HermitianOperator(h0 * Complex{0.5, 0.0}),
                               HermitianOperator(h1 * Complex{0.5, 0.0}), Temperature(2.0));
    CHECK(std::abs(rq1.Sigma - rq2.Sigma) <= 1e-9);
    CHECK(std::abs(rq1.dS_rel - rq2.dS_rel) <= 1e-9);
}

TEST_CASE("diagonal_reduction_check agreement and precondition errors") {
    const double tau = 5.0;
    std::vector<Schedule> s;
    s.emplace_back(Schedule({{0.0, 0.0}, {tau, 0.0}}));
    s.emplace_back(Schedule({{0.0, 0.01}, {tau, 4.0}}));
    const ClassicalProtocol cproto(tau, std::move(s), 1.0, Temperature(1.0));
    const QuantumProtocol qproto(tau, {{0.0, diag({0.0, 0.01})}, {tau, diag({0.0, 4.0})}}, 1.0,
                                 Temperature(1.0));
    const DensityMatrix rho0 = gibbs_state(HermitianOperator(diag({0.0, 0.01})),
                                           Temperature(1.0));

    CHECK(diagonal_reduction_check(qproto, cproto, rho0, 400) <= 1e-6);

    // static pair agrees to round-off
    std::vector<Schedule> st;
    st.emplace_back(Schedule({{0.0, 0.0}, {2.0, 0.0}}));
    st.emplace_back(Schedule({{0.0, 1.0}, {2.0, 1.0}}));
    const ClassicalProtocol cstatic(2.0, std::move(st), 1.0, Temperature(1.0));
    const QuantumProtocol qstatic(2.0, {{0.0, diag({0.0, 1.0})}, {2.0, diag({0.0, 1.0})}}, 1.0,
                                  Temperature(1.0));
    const DensityMatrix geq = gibbs_state(HermitianOperator(diag({0.0, 1.0})), Temperature(1.0));
    CHECK(diagonal_reduction_check(qstatic, cstatic, geq, 200) <= 1e-10);

    // off-diagonal initial state is rejected
    ComplexMatrix coherent(2);
    coherent(0, 0) = 0.5;
    coherent(1, 1) = 0.5;
    coherent(0, 1) = 0.2;
    coherent(1, 0) = 0.2;
    CHECK_THROWS_AS(diagonal_reduction_check(qproto, cproto, DensityMatrix(coherent), 100),
                    NotDiagonalError);

    // off-diagonal Hamiltonian knot is rejected
    ComplexMatrix hx = diag({0.0, 4.0});
    hx(0, 1) = 0.1;
    hx(1, 0) = 0.1;
    const QuantumProtocol qbad(tau, {{0.0, diag({0.0, 0.01})}, {tau, hx}}, 1.0, Temperature(1.0));
    CHECK_THROWS_AS(diagonal_reduction_check(qbad, cproto, rho0, 100), NotDiagonalError);

    // coupling mismatch is rejected
    const QuantumProtocol qgamma(tau, {{0.0, diag({0.0, 0.01})}, {tau, diag({0.0, 4.0})}}, 2.0,
                                 Temperature(1.0));
    CHECK_THROWS_AS(diagonal_reduction_check(qgamma, cproto, rho0, 100), NotDiagonalError);
}

TEST_CASE("tau_sweep: single point, ordering, validation") {
    const auto fam = reset_family();

    const SweepResult single = tau_sweep(fam, {2.0}, 100);
    REQUIRE(single.taus.size() == 1);
    const ClassicalProtocol proto = fam.at_tau(2.0);
    const TrajectoryLedger led =
        integrate_classical(proto, fam.initial_state(), steps_for_tau(2.0, 100));
    const DecompositionReport direct =
        decompose(led, proto.levels_at(0.0), proto.levels_at(2.0), Temperature(1.0));
    CHECK(single.reports[0].W == direct.W);
    CHECK(single.reports[0].W_pn_direct == direct.W_pn_direct);

    const SweepResult sweep = tau_sweep(fam, {0.1, 1.0, 10.0, 100.0}, 10);
    for (std::size_t k = 1; k < sweep.reports.size(); ++k)
        CHECK(sweep.reports[k].W_pn_direct <= sweep.reports[k - 1].W_pn_direct + 1e-7);
    CHECK(sweep.reports.back().W_pn_direct < sweep.reports.front().W_pn_direct);

    CHECK_THROWS_AS(tau_sweep(fam, {}, 10), DomainError);
    CHECK_THROWS_AS(tau_sweep(fam, {1.0, 0.5}, 10), DomainError);
    CHECK_THROWS_AS(tau_sweep(fam, {-1.0, 0.5}, 10), DomainError);

    CHECK(steps_for_tau(0.1, 20) == 200);
    CHECK(steps_for_tau(100.0, 20) == 2000);
}

TEST_CASE("nelder_mead: quadratic bowl, budget exhaustion, flat objective") {
    const auto bowl = [](const std::vector<double>& x) {
        return (x[0] - 2.0) * (x[0] - 2.0) + 3.0 * (x[1] + 1.0) * (x[1] + 1.0);
    };
    const std::vector<std::pair<double, double>> box = {{-5.0, 5.0}, {-5.0, 5.0}};

    const OptimizationResult r = nelder_mead(bowl, {0.0, 0.0}, box, 400);
    CHECK(r.converged);
    CHECK(std::abs(r.best_parameters[0] - 2.0) <= 1e-3);
    CHECK(std::abs(r.best_parameters[1] + 1.0) <= 1e-3);
    CHECK(r.best_W_pn == bowl(r.best_parameters));

    const OptimizationResult one = nelder_mead(bowl, {1.0, 1.0}, box, 1);
    CHECK(one.evaluations == 1);
    CHECK_FALSE(one.converged);
    CHECK(one.best_parameters[0] == 1.0);
    CHECK(one.best_W_pn == bowl({1.0, 1.0}));

    const OptimizationResult flat =
        nelder_mead([](const std::vector<double>&) { return 7.0; }, {1.0, 1.0}, box, 400);
    CHECK(flat.converged);
    CHECK(flat.best_W_pn == 7.0);
    CHECK(flat.best_parameters[0] == 1.0);

    // constrained minimum lands on the boundary
    const OptimizationResult edge = nelder_mead(
        [](const std::vector<double>& x) { return (x[0] + 3.0) * (x[0] + 3.0); }, {2.0},
        {{0.0, 5.0}}, 300);
    CHECK(std::abs(edge.best_parameters[0]) <= 1e-3);

    CHECK_THROWS_AS(nelder_mead(bowl, {0.0}, box, 10), DimMismatchError);
    CHECK_THROWS_AS(nelder_mead(bowl, {0.0, 0.0}, box, 0), DomainError);
}

TEST_CASE("optimize_protocol: classical mid knot beats the linear ramp") {
    const double tau = 3.0, spt = 10;
    const double linear_mid = 0.5 * (0.01 + 4.0);
    const auto seeded = reset_family_mid(linear_mid);

    // baseline: the family evaluated at its own seed
    const ClassicalProtocol base = seeded.at_tau(tau);
    const auto led = integrate_classical(base, seeded.initial_state(), steps_for_tau(tau, spt));
    const double baseline =
        decompose(led, base.levels_at(0.0), base.levels_at(tau), Temperature(1.0)).W_pn_direct;

    const OptimizationResult r =
        optimize_protocol(seeded, tau, {{0.01, 4.0}}, 80, static_cast<std::size_t>(spt));
    CHECK(r.best_W_pn <= baseline + 1e-15);
    CHECK(r.evaluations <= 80);

    // re-evaluation reproduces the reported optimum
    const auto refam = reset_family_mid(r.best_parameters[0]);
    const ClassicalProtocol best = refam.at_tau(tau);
    const auto led2 = integrate_classical(best, refam.initial_state(), steps_for_tau(tau, spt));
    const double re =
        decompose(led2, best.levels_at(0.0), best.levels_at(tau), Temperature(1.0)).W_pn_direct;
    CHECK(std::abs(re - r.best_W_pn) <= 1e-9);
}

TEST_CASE("optimize_protocol: quantum interior knot parameters") {
    ComplexMatrix h0(2), hm(2), h1(2);
    h0(0, 1) = 0.3;
    h0(1, 0) = 0.3;
    h0(1, 1) = 1.0;
    hm(0, 1) = 0.25;
    hm(1, 0) = 0.25;
    hm(1, 1) = 1.2;
    h1(0, 1) = 0.2;
    h1(1, 0) = 0.2;
    h1(1, 1) = 1.4;
    const QuantumRampFamily fam{{{0.0, h0}, {0.5, hm}, {1.0, h1}}, 0.8, Temperature(1.0), {}};

    const double tau = 2.0;
    const std::size_t spt = 10;
    const QuantumProtocol base = fam.at_tau(tau);
    const auto led = integrate_quantum(base, fam.initial_state(), steps_for_tau(tau, spt));
    const double baseline = decompose(led, HermitianOperator(base.hamiltonian_at(0.0)),
                                      HermitianOperator(base.hamiltonian_at(tau)),
                                      Temperature(1.0))
                                .W_pn_direct;

    // parameters per interior knot: [d0, d1, re01, im01]
    const std::vector<std::pair<double, double>> box = {
        {-1.0, 1.0}, {0.0, 2.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    const OptimizationResult q = optimize_protocol(fam, tau, box, 60, spt);
    CHECK(q.best_W_pn <= baseline + 1e-15);
    REQUIRE(q.best_parameters.size() == 4);

    // re-evaluate the returned knot
    ComplexMatrix hopt(2);
    hopt(0, 0) = q.best_parameters[0];
    hopt(1, 1) = q.best_parameters[1];
    hopt(0, 1) = Complex{q.best_parameters[2], q.best_parameters[3]};
    hopt(1, 0) = std::conj(hopt(0, 1));
    const QuantumRampFamily refam{{{0.0, h0}, {0.5, hopt}, {1.0, h1}}, 0.8, Temperature(1.0), {}};
    const QuantumProtocol best = refam.at_tau(tau);
    const auto led2 = integrate_quantum(best, refam.initial_state(), steps_for_tau(tau, spt));
    const double re = decompose(led2, HermitianOperator(best.hamiltonian_at(0.0)),
                                HermitianOperator(best.hamiltonian_at(tau)), Temperature(1.0))
                          .W_pn_direct;
    CHECK(std::abs(re - q.best_W_pn) <= 1e-9);
}
