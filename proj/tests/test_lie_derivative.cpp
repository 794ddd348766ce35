#include <doctest.h>

#include <cmath>

#include "kvn/lie_derivative.hpp"
#include "kvn/random.hpp"

using namespace kvn;

TEST_CASE("one-form action of H_ferm") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    RMat H(2, 2);
    H << 2, 0, 0, 1;
    CVec v = CVec::Zero(4);
    v(1) = 1;
    v(2) = 0.5;
    // -i M^T psi with M = omega Hess
    RMat M = symplectic_form(1) * H;
    CVec expect = CVec::Zero(4);
    Eigen::Vector2cd u(v(1), v(2));
    Eigen::Vector2cd w = -I * M.transpose().cast<cplx>() * u;
    expect(1) = w(0);
    expect(2) = w(1);
    CHECK((ferm_matrix(a1, H).matrix * v - expect).norm() < 1e-14);
}

TEST_CASE("H_ferm preserves form degree and kills 0-forms and top forms") {
    Rng g(2);
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        CMat F = ferm_matrix(alg, random_symmetric(2 * n, g)).matrix;
        for (int r = 0; r < F.rows(); ++r)
            for (int c = 0; c < F.cols(); ++c)
                if (std::popcount(unsigned(r)) != std::popcount(unsigned(c))) CHECK(F(r, c) == cplx{});
        CHECK(F.col(0).norm() == 0.0);
    }
}

TEST_CASE("cbar representation") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    CMat T = cbar_transform(a1);
    CMat expect = CMat::Zero(4, 4);
    expect(0, 3) = 1;
    expect(1, 2) = 1;
    expect(2, 1) = -1;
    expect(3, 0) = -1;
    CHECK((T - expect).cwiseAbs().maxCoeff() == 0.0);
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        CMat Tn = cbar_transform(alg);
        double sign = n % 2 ? -1.0 : 1.0;
        CHECK((Tn * Tn - sign * CMat::Identity(alg.fiber_dim(), alg.fiber_dim())).norm() < 1e-12);
        CVec v = CVec::LinSpaced(alg.fiber_dim(), 0.1, 1.0);
        CHECK((from_cbar_representation(alg, to_cbar_representation(alg, v)) - v).norm() < 1e-12);
    }
}

TEST_CASE("cbar one-form components follow the Jacobi monodromy") {
    for (int n = 1; n <= 2; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        auto m = quartic_model(n, 1.0);
        PhasePoint x = PhasePoint::Constant(2 * n, 0.4);
        CVec f0 = CVec::Zero(alg.fiber_dim());
        for (int a = 0; a < 2 * n; ++a) f0(1 << a) = cplx(0.3 + a, 0.1 * a);
        auto r = evolve_fiber(m, svh_metric(alg), x, f0, 3, 1e-3);
        CMat T = cbar_transform(alg);
        CVec b0 = T * f0, b1 = T * r.fiber.back();
        CVec u0(2 * n), u1(2 * n);
        for (int a = 0; a < 2 * n; ++a) {
            u0(a) = b0(1 << a);
            u1(a) = b1(1 << a);
        }
        CHECK((u1 - r.jacobi.monodromy.cast<cplx>() * u0).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("norm conservation follows self-adjointness") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    PhasePoint x(2);
    x << 0.3, 0.1;
    CVec f = CVec::Zero(4);
    f(1) = std::sqrt(0.5);
    f(2) = I * std::sqrt(0.5);
    f(3) = 0.2;
    for (const Metric& m : {gauge_metric(a1), symplectic_metric(a1)}) {
        auto r = evolve_fiber(quartic_model(1, 1), m, x, f, 5, 1e-3);
        for (double v : r.norm) CHECK(std::abs(v - r.norm[0]) < 1e-9);
    }
    auto r = evolve_fiber(inverted_model(1), svh_metric(a1), x, f, 5, 1e-3);
    CHECK(r.norm.back() > 100 * r.norm.front());
}

TEST_CASE("norm functional weights states") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    CVec e = CVec::Zero(4);
    e(0) = 1;
    CHECK(norm_functional(svh_metric(a1), {{0.5, e}, {1.5, 2.0 * e}}) == doctest::Approx(6.5));
    CHECK_THROWS_AS(norm_functional(svh_metric(a1), {{-1.0, e}}), Error);
}

TEST_CASE("ring Liouvillian spectrum") {
    for (int N : {16, 32, 33}) {
        RVec ev = ring_liouvillian_spectrum(1.5, N);
        for (int k = 0; k < ev.size(); ++k) {
            double r = ev(k) / 1.5;
            CHECK(std::abs(r - std::round(r)) < 1e-10);
        }
    }
    auto L = ring_liouvillian(1.0, {0.5, 1.0, 2.0}, 16);
    CHECK(L.op.rows() == 48);
    CHECK((L.op - L.op.adjoint()).norm() < 1e-12);
}

TEST_CASE("time-ordered exponential matches RK4 for constant Hessians") {
    PhasePoint x(2);
    x << 0.3, 0.1;
    CVec f = CVec::Zero(4);
    f(1) = 1;
    CHECK(propagator_equivalence_check(harmonic_model(1, 1, 1), x, f, 2, 1e-3) < 1e-10);
    CHECK(propagator_equivalence_check(inverted_model(1), x, f, 2, 1e-3) < 1e-10);
}
