#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "kvn/io.hpp"

using namespace kvn;

TEST_CASE("metric JSON round trip") {
    for (const Metric& m : {gauge_metric(AlgebraDescriptor::phase_space(2)), general_metric_B(0.0, 1.0, cplx{0, 1})}) {
        Metric r = metric_from_json(Json::parse(metric_to_json(m).dump()));
        CHECK(r.family == m.family);
        CHECK(r.params == m.params);
        CHECK(r.algebra == m.algebra);
        CHECK((r.g - m.g).norm() == 0.0);
    }
}

TEST_CASE("metric files") {
    auto path = (std::filesystem::temp_directory_path() / "kvn_io_metric.json").string();
    Metric m = symplectic_metric(AlgebraDescriptor::phase_space(1));
    save_metric(m, path);
    CHECK((load_metric(path).g - m.g).norm() == 0.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_metric(path), Error);
}

TEST_CASE("invalid metrics are rejected") {
    Json j = metric_to_json(svh_metric(AlgebraDescriptor::phase_space(1)));
    j["g"][1] = Json::array({0.5, 0.0});  // breaks conjugate symmetry
    CHECK_THROWS_AS(metric_from_json(j), Error);
}

TEST_CASE("state JSON round trip") {
    CVec v = CVec::Zero(8);
    v(3) = cplx{0.25, -1};
    v(5) = 2;
    Json j = state_to_json(v);
    CHECK(j.size() == 2);
    CHECK((state_from_json(j, 8) - v).norm() == 0.0);
    CHECK_THROWS_AS(state_from_json(j, 4), Error);
}
