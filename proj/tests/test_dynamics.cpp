#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kvn/dynamics.hpp"
#include "kvn/random.hpp"

using namespace kvn;

namespace {

PhasePoint point(std::initializer_list<double> v) {
    PhasePoint x(v.size());
    int k = 0;
    for (double a : v) x(k++) = a;
    return x;
}

}  // namespace

TEST_CASE("parsed expressions match finite differences") {
    auto m = parse_hamiltonian("p1^2/2 + p2^2/2 + q1^4/4 + sin(q1*q2) + exp(q2)*cos(p1)", 2);
    Rng g(9);
    for (int trial = 0; trial < 10; ++trial) {
        PhasePoint x(4);
        for (int a = 0; a < 4; ++a) x(a) = 2 * uniform01(g) - 1;
        const double h = 1e-5;
        RVec gr = m.gradient(x);
        RMat H = m.hessian(x);
        for (int a = 0; a < 4; ++a) {
            PhasePoint xp = x, xm = x;
            xp(a) += h;
            xm(a) -= h;
            CHECK(gr(a) == doctest::Approx((m.evaluate(xp) - m.evaluate(xm)) / (2 * h)).epsilon(1e-8));
            RVec dg = (m.gradient(xp) - m.gradient(xm)) / (2 * h);
            for (int b = 0; b < 4; ++b) CHECK(H(b, a) == doctest::Approx(dg(b)).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("parser agrees with builtin models") {
    auto p = parse_hamiltonian("p^2/2 + q^4/4");
    auto b = quartic_model(1, 1.0);
    auto x = point({0.7, -0.2});
    CHECK(p.evaluate(x) == doctest::Approx(b.evaluate(x)));
    CHECK((p.hessian(x) - b.hessian(x)).norm() < 1e-14);
    CHECK(p.hessian(point({1.0, 0.3}))(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("parse errors report positions") {
    try {
        parse_hamiltonian("q^1.5");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position == 1);  // the caret
    }
    CHECK_THROWS_AS(parse_hamiltonian("q + r"), ParseError);
    CHECK_THROWS_AS(parse_hamiltonian("(q + p"), ParseError);
    CHECK_THROWS_AS(make_model("q3^2", 2), ParseError);
}

TEST_CASE("harmonic flow returns after one period") {
    auto m = harmonic_model(1, 1, 1);
    auto x0 = point({1.0, 0.0});
    auto tr = flow(m, x0, 2 * std::numbers::pi, 1e-3);
    CHECK((tr.phi.back() - x0).norm() < 1e-10);
    CHECK(tr.energy_drift < 1e-10);
}

TEST_CASE("quartic energy is conserved") {
    auto tr = flow(quartic_model(1, 1), point({1.0, 0.3}), 10, 1e-3);
    CHECK(tr.energy_drift < 1e-10);
}

TEST_CASE("inverted oscillator monodromy is hyperbolic") {
    auto j = monodromy(inverted_model(1), point({1.0, 0.0}), 1.0, 1e-3);
    RMat expect(2, 2);
    expect << std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0);
    CHECK((j.monodromy - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("monodromy is symplectic and a cocycle") {
    for (int n = 1; n <= 2; ++n) {
        auto m = quartic_model(n, 1.0);
        PhasePoint x = PhasePoint::Constant(2 * n, 0.4);
        x(0) = 0.9;
        RMat w = symplectic_form(n);
        auto j1 = monodromy(m, x, 1.0, 1e-3);
        auto j2 = monodromy(m, j1.phi, 1.5, 1e-3);
        auto j12 = monodromy(m, x, 2.5, 1e-3);
        CHECK((j12.monodromy * w * j12.monodromy.transpose() - w).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((j2.monodromy * j1.monodromy - j12.monodromy).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("Lyapunov estimates") {
    auto x = point({1.0, 0.0});
    CHECK(lyapunov(inverted_model(1), x, 20, 1e-3) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(lyapunov(harmonic_model(1, 1, 1), x, 50, 1e-3)) < 0.05);
    CHECK(std::abs(lyapunov(free_model(1), x, 100, 1e-3)) < 0.06);
}

TEST_CASE("Monte-Carlo Lyapunov is reproducible") {
    auto a = lyapunov_monte_carlo(quartic_model(1, 1), 4, 123, 1.0, 5, 1e-2);
    auto b = lyapunov_monte_carlo(quartic_model(1, 1), 4, 123, 1.0, 5, 1e-2);
    CHECK(a.estimates == b.estimates);
    CHECK(a.mean == b.mean);
    for (const auto& s : a.starts) CHECK(s.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("step planning and trajectory output") {
    auto p = plan_steps(1.0, 0.3);
    CHECK(p.steps == 4);
    CHECK(p.h == doctest::Approx(0.25));
    CHECK_THROWS_AS(plan_steps(1.0, 0.0), Error);
    std::ostringstream os;
    write_trajectory_csv(os, flow(harmonic_model(1, 1, 1), point({1, 0}), 0.5, 0.25), 1);
    CHECK(os.str().rfind("t,q1,p1,energy\n", 0) == 0);
}

TEST_CASE("asymmetric Hessians are rejected") {
    HamiltonianModel bad(
        1, [](const PhasePoint&) { return 0.0; }, [](const PhasePoint&) { return RVec::Zero(2); },
        [](const PhasePoint&) {
            RMat h = RMat::Zero(2, 2);
            h(0, 1) = 1;
            return h;
        },
        "bad");
    CHECK_THROWS_AS(bad.hessian(point({0, 0})), Error);
}
