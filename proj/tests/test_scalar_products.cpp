#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kvn/lie_derivative.hpp"
#include "kvn/random.hpp"

using namespace kvn;

namespace {

CVec random_state(int dim, Rng& g) {
    CVec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx{2 * uniform01(g) - 1, 2 * uniform01(g) - 1};
    return v;
}

}  // namespace

TEST_CASE("builtin signatures") {
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        CHECK(signature(svh_metric(alg)) == Signature{1 << (2 * n), 0, 0});
    }
    auto a1 = AlgebraDescriptor::phase_space(1);
    CHECK(signature(gauge_metric(a1)) == Signature{2, 2, 0});
    CHECK(signature(symplectic_metric(a1)) == Signature{2, 2, 0});
}

TEST_CASE("metric adjoint satisfies the defining relation") {
    Rng g(7);
    for (int n = 1; n <= 2; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        for (const Metric& m : {svh_metric(alg), gauge_metric(alg), symplectic_metric(alg)}) {
            const int D = alg.fiber_dim();
            CMat A(D, D);
            for (int i = 0; i < D; ++i) A.col(i) = random_state(D, g);
            CMat Ad = adjoint(m, A);
            CVec phi = random_state(D, g), psi = random_state(D, g);
            CHECK(std::abs(inner(m, phi, A * psi) - inner(m, Ad * phi, psi)) < 1e-12);
            CHECK((adjoint(m, Ad) - A).norm() < 1e-12);
        }
    }
}

TEST_CASE("signature is invariant under congruence") {
    Rng g(3);
    auto alg = AlgebraDescriptor::phase_space(1);
    for (const Metric& m : {svh_metric(alg), gauge_metric(alg), general_metric_A(0.5)}) {
        for (int trial = 0; trial < 5; ++trial) {
            CMat P(4, 4);
            for (int i = 0; i < 4; ++i) P.col(i) = random_state(4, g);
            P += 3.0 * CMat::Identity(4, 4);
            Metric m2 = custom_metric(alg, P.adjoint() * m.g * P);
            CHECK(signature(m2) == signature(m));
        }
    }
}

TEST_CASE("self-adjointness dichotomy for H_ferm") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    for (double v : {0.3, 1.0, 2.0, -1.5}) {
        RMat H(2, 2);
        H << v, 0, 0, 1;
        CMat F = ferm_matrix(a1, H).matrix;
        CHECK(hermiticity_residual(svh_metric(a1), F) == doctest::Approx(std::sqrt(2.0) * std::abs(v - 1)).epsilon(1e-12));
        CHECK(hermiticity_residual(gauge_metric(a1), F) < 1e-12);
        CHECK(hermiticity_residual(symplectic_metric(a1), F) < 1e-12);
    }
}

TEST_CASE("eigenvectors with non-real eigenvalues have zero norm") {
    // holds for any operator self-adjoint under an indefinite product
    for (int n = 1; n <= 2; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        RMat H = RMat::Identity(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) H(i, i) = -1.0 - i;  // inverted directions
        CMat F = ferm_matrix(alg, H).matrix;
        for (const Metric& m : {gauge_metric(alg), symplectic_metric(alg)}) {
            Eigen::ComplexEigenSolver<CMat> es(F);
            int complex_pairs = 0;
            for (int k = 0; k < F.rows(); ++k) {
                if (std::abs(es.eigenvalues()(k).imag()) < 1e-8) continue;
                ++complex_pairs;
                CVec v = es.eigenvectors().col(k);
                CHECK(std::abs(inner(m, v, v)) < 1e-10 * v.squaredNorm());
            }
            CHECK(complex_pairs > 0);
        }
    }
}

TEST_CASE("family A eigenvalues") {
    for (double b : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        RVec ev = metric_eigenvalues(general_metric_A(b));
        std::vector<double> got(ev.data(), ev.data() + ev.size()), want{1, b, -b, -b * b};
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        for (int k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-10));
    }
}

TEST_CASE("family C with b = 0 and theta = 0 reproduces the gauge product") {
    auto gm = gauge_metric(AlgebraDescriptor::phase_space(1));
    auto c = general_metric_C(0.0, 0.0, cplx{0, -1});
    CHECK((c.g - gm.g).norm() < 1e-12);
}

TEST_CASE("conjugation rules are realized by their metrics") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    std::vector<CMat> ops;
    for (int a = 0; a < 2; ++a) ops.push_back(wedge_op(a1, a).matrix);
    for (int a = 0; a < 2; ++a) ops.push_back(contraction_op(a1, a).matrix);
    auto realized = [&](const Metric& m, const ConjugationRule& r) {
        double e = 0;
        for (int k = 0; k < 4; ++k) {
            CMat t = CMat::Zero(4, 4);
            for (int j = 0; j < 4; ++j) t += r.dagger(k, j) * ops[j];
            e = std::max(e, (adjoint(m, ops[k]) - t).norm());
        }
        return e;
    };
    CHECK(realized(svh_metric(a1), ConjugationRule::svh(a1)) < 1e-12);
    CHECK(realized(gauge_metric(a1), ConjugationRule::gauge(a1)) < 1e-12);
    CHECK(realized(symplectic_metric(a1), ConjugationRule::symplectic(a1)) < 1e-12);
    for (double b : {0.5, -1.0, 2.0})
        CHECK(realized(general_metric_A(b),
                       ConjugationRule::from_pairs(PairRule::family1(b), PairRule::family1(-b))) < 1e-12);
}

TEST_CASE("classification of pair rules") {
    CHECK(classify_pair(PairRule::family1(0.5)).tag == RuleClass::family1);
    CHECK(classify_pair(PairRule::family2(0.3, 1.0)).tag == RuleClass::family2);
    CHECK(classify_pair(PairRule::family3(0.3, 1.0)).tag == RuleClass::family3);
    // a dagger that is not an involution
    PairRule bad{2.0, 0.0, 0.0, 1.0};
    auto c = classify_pair(bad);
    CHECK(c.tag == RuleClass::inconsistent);
    CHECK(!c.failure.empty());
}

TEST_CASE("custom metrics are validated") {
    auto a1 = AlgebraDescriptor::phase_space(1);
    CMat g = CMat::Identity(4, 4);
    g(0, 1) = 1.0;
    CHECK_THROWS_AS(custom_metric(a1, g), Error);
    CHECK_THROWS_AS(custom_metric(a1, CMat::Zero(4, 4)), Error);
    CHECK_NOTHROW(custom_metric(a1, -CMat::Identity(4, 4)));
}

TEST_CASE("parameter-valued inner product agrees with the numeric one") {
    auto alg = AlgebraDescriptor::phase_space(1);
    Rng g(5);
    CVec a = random_state(4, g), b = random_state(4, g);
    Metric m = gauge_metric(alg);
    auto r = inner(m, Multivector::from_vector(alg, a), Multivector::from_vector(alg, b));
    CHECK(std::abs(r.get(0) - inner(m, a, b)) < 1e-13);
}
