#include <doctest.h>

#include "kvn/grassmann.hpp"
#include "kvn/random.hpp"

using namespace kvn;

namespace {

Multivector random_element(const AlgebraDescriptor& alg, Rng& g) {
    Multivector v(alg);
    const Mask top = Mask{1} << alg.total_bits();
    for (Mask m = 0; m < top; ++m)
        if (uniform01(g) < 0.3) v.add(m, cplx{2 * uniform01(g) - 1, 2 * uniform01(g) - 1});
    return v;
}

}  // namespace

TEST_CASE("canonical anticommutators are exact integer tables") {
    for (int n = 1; n <= 3; ++n) {
        auto alg = AlgebraDescriptor::phase_space(n);
        const int N = alg.n_state, D = alg.fiber_dim();
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                CMat cb = anticommutator(contraction_op(alg, a).matrix, wedge_op(alg, b).matrix);
                CMat expect = (a == b ? 1.0 : 0.0) * CMat::Identity(D, D);
                CHECK((cb - expect).cwiseAbs().maxCoeff() == 0.0);
                CHECK(anticommutator(wedge_op(alg, a).matrix, wedge_op(alg, b).matrix).cwiseAbs().maxCoeff() == 0.0);
                CHECK(anticommutator(contraction_op(alg, a).matrix, contraction_op(alg, b).matrix)
                          .cwiseAbs()
                          .maxCoeff() == 0.0);
            }
    }
}

TEST_CASE("reordering signs") {
    CHECK(product_sign(0b01, 0b10) == 1);
    CHECK(product_sign(0b10, 0b01) == -1);
    CHECK(product_sign(0b11, 0b01) == 0);
    CHECK(product_sign(0b110, 0b001) == 1);
}

TEST_CASE("generators anticommute and square to zero") {
    auto alg = AlgebraDescriptor::phase_space(2, 2);
    for (int a = 0; a < alg.total_bits(); ++a)
        for (int b = 0; b < alg.total_bits(); ++b) {
            auto ea = Multivector::monomial(alg, Mask{1} << a), eb = Multivector::monomial(alg, Mask{1} << b);
            CHECK((ea * eb + eb * ea).is_zero());
        }
}

TEST_CASE("product is associative and distributive on random elements") {
    auto alg = AlgebraDescriptor::phase_space(1, 2);
    Rng g(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_element(alg, g), y = random_element(alg, g), z = random_element(alg, g);
        CHECK(((x * y) * z).max_abs_diff(x * (y * z)) < 1e-12);
        CHECK((x * (y + z)).max_abs_diff(x * y + x * z) < 1e-12);
    }
}

TEST_CASE("Berezin integral") {
    auto alg = AlgebraDescriptor::single_mode(1);
    const int t = alg.param_bit(0);
    auto theta = Multivector::param(alg, 0);
    CHECK(berezin_integrate(theta, t).max_abs_diff(Multivector::scalar(alg, 1.0)) == 0.0);
    CHECK(berezin_integrate(Multivector::scalar(alg, 1.0), t).is_zero());
    // left derivative: moving past the odd generator costs a sign
    auto c = Multivector::generator(alg, 0);
    CHECK(berezin_integrate(c * theta, t).max_abs_diff(-c) == 0.0);
}

TEST_CASE("nested integration order") {
    auto alg = AlgebraDescriptor::phase_space(1, 2);
    auto x = Multivector::param(alg, 0), y = Multivector::param(alg, 1);
    // int dx int dy (y x) = int dx x = 1
    auto r = berezin_integrate(y * x, std::vector<int>{alg.param_bit(0), alg.param_bit(1)});
    CHECK(r.max_abs_diff(Multivector::scalar(alg, 1.0)) == 0.0);
}

TEST_CASE("nilpotent exponential") {
    auto alg = AlgebraDescriptor::phase_space(1, 1);
    auto x = Multivector::param(alg, 0) * Multivector::generator(alg, 0);
    auto e = exp_nilpotent(x);
    CHECK(e.max_abs_diff(Multivector::scalar(alg, 1.0) + x) == 0.0);
    // exp(a) exp(-a) = 1 for even a
    auto y = Multivector::generator(alg, 0) * Multivector::generator(alg, 1) * cplx{0.7};
    CHECK((exp_nilpotent(y) * exp_nilpotent(-y)).max_abs_diff(Multivector::scalar(alg, 1.0)) < 1e-15);
}

TEST_CASE("number operators count occupied generators") {
    auto alg = AlgebraDescriptor::phase_space(2);
    auto ops = number_ops(alg);
    REQUIRE(ops.size() == 4);
    for (int a = 0; a < 4; ++a) {
        CMat expect = CMat::Zero(16, 16);
        for (int S = 0; S < 16; ++S) expect(S, S) = (S >> a) & 1;
        CHECK((ops[a].matrix - expect).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("operators act index-wise on parameter-valued states") {
    auto alg = AlgebraDescriptor::phase_space(1, 1);
    // psi = c^p theta; the operator acts on the state factor only
    auto psi = Multivector::generator(alg, 1) * Multivector::param(alg, 0);
    auto out = wedge_op(alg, 0).apply(psi);
    CHECK(out.max_abs_diff(Multivector::generator(alg, 0) * Multivector::generator(alg, 1) *
                           Multivector::param(alg, 0)) < 1e-15);
}
