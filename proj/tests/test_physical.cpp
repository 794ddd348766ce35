#include <doctest.h>

#include <bit>

#include "kvn/physical.hpp"
#include "kvn/random.hpp"

using namespace kvn;

TEST_CASE("generic kernel is spanned by powers of the symplectic two-form") {
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        auto hs = random_hessians(n, 3, 7);
        CMat K = ferm_kernel(alg, hs);
        auto b = svh_physical_basis(alg);
        CMat B(alg.fiber_dim(), b.size());
        for (std::size_t k = 0; k < b.size(); ++k) B.col(k) = b[k];
        CHECK(K.cols() == n + 1);
        CHECK(max_principal_angle(K, B) < 1e-8);
        auto cl = closure_check(alg, svh_metric(alg), hs, b);
        CHECK(cl.hermiticity < 1e-12);
        CHECK(cl.commutator < 1e-12);
    }
}

TEST_CASE("exterior lift is multiplicative") {
    auto alg = AlgebraDescriptor::phase_space(1);
    CMat A(2, 2), B(2, 2);
    A << 1, 2, 3, cplx(0, 1);
    B << 0.5, -1, 2, 1;
    CHECK((exterior_lift(alg, A * B) - exterior_lift(alg, A) * exterior_lift(alg, B)).norm() < 1e-13);
    CMat L = exterior_lift(alg, A);
    CHECK(L(3, 3) == A.determinant());
}

TEST_CASE("xi variables reassemble H_ferm") {
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        RMat h = random_hessians(n, 1, 11)[0];
        auto xh = xi_hamiltonian(alg, h);
        CHECK((xh.mixed + xh.antiholo + xh.holo - ferm_matrix(alg, h).matrix).norm() < 1e-12);
        CVec v = CVec::LinSpaced(alg.fiber_dim(), -1.0, 1.0);
        CHECK((from_xi(alg, to_xi(alg, v)) - v).norm() < 1e-12);
    }
}

TEST_CASE("xi adjoints and anticommutators under the symplectic product") {
    for (int n = 1; n <= 2; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        Metric sy = symplectic_metric(alg);
        auto ops = xi_basis_change(alg).operators();
        const int D = alg.fiber_dim();
        for (int i = 0; i < n; ++i) {
            CHECK((adjoint(sy, ops[i]) - ops[2 * n + i]).norm() < 1e-12);
            CHECK((adjoint(sy, ops[n + i]) - ops[3 * n + i]).norm() < 1e-12);
            CHECK((anticommutator(ops[i], ops[2 * n + i]) + CMat::Identity(D, D)).norm() < 1e-12);
            CHECK((anticommutator(ops[n + i], ops[3 * n + i]) - CMat::Identity(D, D)).norm() < 1e-12);
        }
        // monomial norms alternate with the number of xi factors
        for (int S = 0; S < D; ++S) {
            CVec e = CVec::Zero(D);
            e(S) = 1;
            CVec v = from_xi(alg, e);
            int nx = std::popcount(unsigned(S & ((1 << n) - 1)));
            CHECK(inner(sy, v, v).real() == doctest::Approx(nx % 2 ? -1.0 : 1.0));
        }
    }
}

TEST_CASE("symplectic physical family") {
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        auto hs = random_hessians(n, 3, 5);
        for (const auto& c : symplectic_physical_family(alg))
            for (const auto& h : hs) {
                auto r = symplectic_physical_check(alg, c, h);
                CHECK(r.last_two < 1e-12);
                CHECK(r.mixed < 1e-12);
            }
    }
    auto a2 = AlgebraDescriptor::phase_space(2);
    auto fam = symplectic_physical_family(a2);
    REQUIRE(fam.size() == 2);
    Metric sy = symplectic_metric(a2);
    CMat G(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) G(i, j) = inner(sy, from_xi(a2, fam[i]), from_xi(a2, fam[j]));
    CHECK((G - Eigen::Vector2cd(1, 4).asDiagonal().toDenseMatrix()).norm() < 1e-12);
    // X^2 in c variables is -2 c^{p1} c^{q1} c^{p2} c^{q2}
    Multivector w(a2);
    w = Multivector::generator(a2, a2.p(0)) * Multivector::generator(a2, a2.q(0)) *
        Multivector::generator(a2, a2.p(1)) * Multivector::generator(a2, a2.q(1));
    CVec cf = from_xi(a2, fam[1]);
    CHECK((cf + 2.0 * w.to_vector()).norm() < 1e-12);
}

TEST_CASE("unequal coefficients leave the symplectic kernel") {
    auto a2 = AlgebraDescriptor::phase_space(2);
    CVec c = CVec::Zero(16);
    c(0b0101) = 1;
    c(0b1010) = 2;
    CHECK(symplectic_physical_check(a2, c, random_hessians(2, 1, 11)[0]).last_two > 0.1);
}

TEST_CASE("psi variables are self-adjoint under the symplectic product") {
    for (int n = 1; n <= 2; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        Metric sy = symplectic_metric(alg);
        for (const auto& o : psi_basis_change(alg).operators()) CHECK((adjoint(sy, o) - o).norm() < 1e-12);
        CHECK((psi_inverse(alg).op_map - CMat::Identity(4 * n, 4 * n)).norm() < 1e-12);
    }
}

TEST_CASE("principal angles") {
    CMat a = CMat::Identity(4, 2), b = CMat::Zero(4, 2);
    b(0, 0) = 1;
    b(3, 1) = 1;
    CHECK(max_principal_angle(a, a) < 1e-15);
    CHECK(max_principal_angle(a, b) == doctest::Approx(std::numbers::pi / 2));
    CHECK(max_principal_angle(a, CMat::Identity(4, 3)) == doctest::Approx(std::numbers::pi / 2));
}
