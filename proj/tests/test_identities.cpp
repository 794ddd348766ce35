#include <doctest.h>

#include "kvn/identities.hpp"

using namespace kvn;

TEST_CASE("scalar-product tables and resolutions of identity hold exactly") {
    IdentityOptions opt;
    opt.n = 2;
    IdentityReport rep = run_identity_suite(opt);
    CHECK(rep.results.size() >= 40);
    for (const auto& r : rep.results) {
        INFO(r.group << ": " << r.name << " deviation " << r.deviation);
        CHECK(r.pass);
        CHECK(r.deviation < 1e-12);
    }
    CHECK(rep.all_pass);
}

TEST_CASE("a wrong metric override is detected") {
    IdentityOptions opt;
    opt.n = 1;
    auto alg = AlgebraDescriptor::phase_space(1);
    // flip the sign of one SvH diagonal entry
    CMat g = svh_metric(alg).g;
    g(3, 3) = -1.0;
    Metric m = custom_metric(alg, g);
    m.family = MetricFamily::svh;
    opt.overrides.push_back(m);
    CHECK_FALSE(run_identity_suite(opt).all_pass);
}

TEST_CASE("four-variable minus/plus table carries a plus sign") {
    auto alg = AlgebraDescriptor::phase_space(2, 8);
    Metric svh = svh_metric(AlgebraDescriptor::phase_space(2));
    std::vector<Slot> bra, ket;
    Multivector delta = Multivector::scalar(alg, 1.0);
    for (int k = 0; k < 4; ++k) {
        bra.push_back({true, Multivector::pstar(alg, k)});
        ket.push_back({false, Multivector::param(alg, 4 + k)});
        delta = delta * (Multivector::param(alg, k) - Multivector::param(alg, 4 + k));
    }
    auto r = inner(svh, eigen_ket(alg, bra), eigen_ket(alg, ket));
    CHECK(r.max_abs_diff(delta) < 1e-12);
}
