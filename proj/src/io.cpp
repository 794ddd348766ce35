#include "kvn/io.hpp"

#include <fstream>

namespace kvn {

Json cplx_to_json(cplx z) { return Json::array({z.real() + 0.0, z.imag() + 0.0}); }

static cplx cplx_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw Error("complex entry must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json metric_to_json(const Metric& m) {
    Json j;
    j["family"] = family_name(m.family);
    j["params"] = Json::object();
    for (auto& [k, v] : m.params) j["params"][k] = v;
    if (m.algebra.n_pairs == 0 && m.algebra.n_state == 1) j["single_mode"] = true;
    else j["n_pairs"] = m.algebra.n_pairs;
    j["dim"] = m.g.rows();
    Json g = Json::array();
    for (int r = 0; r < m.g.rows(); ++r)
        for (int c = 0; c < m.g.cols(); ++c) g.push_back(cplx_to_json(m.g(r, c)));
    j["g"] = g;
    return j;
}

Metric metric_from_json(const Json& j) {
    try {
        AlgebraDescriptor alg = j.value("single_mode", false) ? AlgebraDescriptor::single_mode()
                                                              : AlgebraDescriptor::phase_space(j.at("n_pairs").get<int>());
        int dim = j.at("dim").get<int>();
        if (dim != alg.fiber_dim()) throw Error("metric dim does not match the fiber");
        const Json& g = j.at("g");
        if (!g.is_array() || int(g.size()) != dim * dim) throw Error("metric needs dim*dim entries");
        CMat m(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m(r, c) = cplx_from_json(g[r * dim + c]);
        Metric out = custom_metric(alg, m);
        out.family = family_from_name(j.value("family", std::string("custom")));
        if (j.contains("params"))
            for (auto& [k, v] : j["params"].items()) out.params[k] = v.get<double>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed metric JSON: ") + e.what());
    }
}

Metric load_metric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open metric file " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("cannot parse " + path + ": " + e.what());
    }
    return metric_from_json(j);
}

void save_metric(const Metric& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << metric_to_json(m).dump(2) << '\n';
}

Json state_to_json(const CVec& v, double tol) {
    Json a = Json::array();
    for (int k = 0; k < v.size(); ++k)
        if (std::abs(v(k)) > tol) a.push_back({{"mask", k}, {"value", cplx_to_json(v(k))}});
    return a;
}

CVec state_from_json(const Json& j, int dim) {
    CVec v = CVec::Zero(dim);
    for (const auto& e : j) {
        int m = e.at("mask").get<int>();
        if (m < 0 || m >= dim) throw Error("mask out of range");
        v(m) += cplx_from_json(e.at("value"));
    }
    return v;
}

Json subspace_to_json(const std::vector<CVec>& basis, double tol) {
    Json a = Json::array();
    for (const auto& v : basis) a.push_back(state_to_json(v, tol));
    return a;
}

LinearCanonical transform_from_json(const Json& j) {
    try {
        const Json& rows = j.at("S");
        const int N = int(rows.size());
        if (N == 0 || N % 2) throw Error("transform needs an even number of rows");
        RMat S(N, N);
        for (int r = 0; r < N; ++r) {
            if (!rows[r].is_array() || int(rows[r].size()) != N) throw Error("transform must be square");
            for (int c = 0; c < N; ++c) S(r, c) = rows[r][c].get<double>();
        }
        return LinearCanonical::from_matrix(S);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed transform JSON: ") + e.what());
    }
}

LinearCanonical load_transform(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open transform file " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("cannot parse " + path + ": " + e.what());
    }
    return transform_from_json(j);
}

}  // namespace kvn
