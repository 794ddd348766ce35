#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "kvn/canonical.hpp"
#include "kvn/identities.hpp"
#include "kvn/io.hpp"
#include "kvn/lie_derivative.hpp"
#include "kvn/nogo.hpp"
#include "kvn/physical.hpp"
#include "kvn/random.hpp"

using namespace kvn;

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct Config {
    int n = 1;
    std::string metric = "svh";
    std::string metric_params;
    std::vector<std::string> metric_files;
    std::string potential = "quartic";
    std::string potential_params;
    std::string phi0;
    std::string fiber;
    std::string transform_file;
    double t = 1.0;
    double dt = 1e-3;
    double renorm = 1.0;
    double box = 1.0;
    double alpha = 2.0;
    double omega_freq = 1.0;
    int n_theta = 32;
    int samples = 0;  // 0 selects the subcommand default
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
};

// Result of a subcommand: structured data, an optional table, and the assertion verdict.
struct Result {
    Json json;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    bool ok = true;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
    return buf;
}

std::map<std::string, double> parse_kv(const std::string& s) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value, got '" + item + "'");
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("bad number in '" + item + "'");
        }
    }
    return out;
}

double get(const std::map<std::string, double>& m, const std::string& k, double fallback) {
    auto it = m.find(k);
    return it == m.end() ? fallback : it->second;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("bad number '" + item + "'");
        }
    }
    return out;
}

Metric read_metric_file(const std::string& path) {
    try {
        return load_metric(path);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

Metric build_metric(const Config& c) {
    auto p = parse_kv(c.metric_params);
    cplx g03{get(p, "g03_re", 0.0), get(p, "g03_im", -1.0)};
    if (c.metric == "svh") return svh_metric(AlgebraDescriptor::phase_space(c.n));
    if (c.metric == "gauge") return gauge_metric(AlgebraDescriptor::phase_space(c.n));
    if (c.metric == "symplectic") return symplectic_metric(AlgebraDescriptor::phase_space(c.n));
    if (c.metric == "A" || c.metric == "B" || c.metric == "C") {
        if (c.n != 1) throw UsageError("metric families A, B, C are defined for n = 1");
        if (c.metric == "A") return general_metric_A(get(p, "b", 1.0));
        if (c.metric == "B") return general_metric_B(get(p, "theta", 0.0), get(p, "gamma_i", 0.0), g03);
        return general_metric_C(get(p, "theta", 0.0), get(p, "b", 0.0), g03);
    }
    if (c.metric == "file") {
        if (c.metric_files.empty()) throw UsageError("--metric file needs --metric-file");
        Metric m = read_metric_file(c.metric_files.front());
        if (!(m.algebra == AlgebraDescriptor::phase_space(c.n))) throw UsageError("metric file does not match --n");
        return m;
    }
    throw UsageError("unknown metric '" + c.metric + "'");
}

HamiltonianModel build_model(const Config& c) {
    auto p = parse_kv(c.potential_params);
    return make_model(c.potential, c.n, get(p, "m", 1.0), get(p, "w", 1.0), get(p, "lambda4", 1.0));
}

PhasePoint build_phi0(const Config& c) {
    PhasePoint x = PhasePoint::Zero(2 * c.n);
    if (c.phi0.empty()) {
        x(0) = 1.0;
        return x;
    }
    auto v = parse_list(c.phi0);
    if (int(v.size()) != 2 * c.n) throw UsageError("--phi0 needs 2n values q1..qn,p1..pn");
    for (int a = 0; a < 2 * c.n; ++a) x(a) = v[a];
    return x;
}

// "xi" or mask=re[:im] entries; default c^{q_1}
CVec build_fiber(const Config& c) {
    const int D = 1 << (2 * c.n);
    CVec f = CVec::Zero(D);
    if (c.fiber.empty()) {
        f(1) = 1;
        return f;
    }
    if (c.fiber == "xi") {
        f(1) = 1 / std::numbers::sqrt2;
        f(1 << c.n) = I / std::numbers::sqrt2;
        return f;
    }
    std::stringstream ss(c.fiber);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("fiber entries are mask=re[:im]");
        try {
            int m = std::stoi(item.substr(0, eq));
            std::string val = item.substr(eq + 1);
            auto colon = val.find(':');
            double re = std::stod(val.substr(0, colon));
            double im = colon == std::string::npos ? 0.0 : std::stod(val.substr(colon + 1));
            if (m < 0 || m >= D) throw UsageError("fiber mask out of range");
            f(m) += cplx{re, im};
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("bad fiber entry '" + item + "'");
        }
    }
    return f;
}

Json signature_json(const Signature& s) { return Json::array({s.n_plus, s.n_minus, s.n_zero}); }

// ---- subcommands

Result run_identities(const Config& c) {
    IdentityOptions opt;
    opt.n = c.n;
    for (const auto& f : c.metric_files) opt.overrides.push_back(read_metric_file(f));
    IdentityReport rep = run_identity_suite(opt);
    Result r;
    r.json["subcommand"] = "identities";
    r.json["n"] = c.n;
    Json rows = Json::array();
    r.header = {"index", "deviation", "pass"};
    int k = 0;
    for (const auto& x : rep.results) {
        rows.push_back({{"group", x.group}, {"name", x.name}, {"deviation", x.deviation}, {"pass", x.pass}});
        r.rows.push_back({double(k++), x.deviation, x.pass ? 1.0 : 0.0});
    }
    r.json["results"] = rows;
    r.json["max_deviation"] = rep.max_deviation;
    r.json["all_pass"] = rep.all_pass;
    r.ok = rep.all_pass;
    for (const auto& x : rep.results)
        if (!x.pass) std::cerr << "FAIL " << x.group << ": " << x.name << " (deviation " << num(x.deviation) << ")\n";
    return r;
}

Result run_hermiticity(const Config& c) {
    Metric m = build_metric(c);
    const int samples = c.samples > 0 ? c.samples : 20;
    std::vector<RMat> hs;
    if (c.potential == "random") {
        hs = random_hessians(c.n, samples, c.seed);
    } else {
        HamiltonianModel model = build_model(c);
        Rng g(c.seed);
        for (int k = 0; k < samples; ++k) {
            PhasePoint x(2 * c.n);
            for (int a = 0; a < 2 * c.n; ++a) x(a) = 2 * uniform01(g) - 1;
            hs.push_back(model.hessian(x));
        }
    }
    Result r;
    r.header = {"sample", "residual"};
    double mx = 0;
    Json res = Json::array();
    for (int k = 0; k < samples; ++k) {
        double v = hermiticity_residual(m, ferm_matrix(m.algebra, hs[k]).matrix);
        mx = std::max(mx, v);
        res.push_back(v);
        r.rows.push_back({double(k), v});
    }
    Signature s = signature(m);
    r.json["subcommand"] = "hermiticity";
    r.json["metric"] = family_name(m.family);
    r.json["n"] = c.n;
    r.json["potential"] = c.potential;
    r.json["signature"] = signature_json(s);
    r.json["residuals"] = res;
    r.json["max_residual"] = mx;
    // gauge and symplectic products make H_ferm self-adjoint for every Hessian
    bool expect_zero = m.family == MetricFamily::gauge || m.family == MetricFamily::symplectic;
    r.json["expected_hermitian"] = expect_zero;
    r.ok = !expect_zero || mx < 1e-10;
    return r;
}

Result run_nogo(const Config& c) {
    if (c.n != 1) throw UsageError("nogo-scan is defined for n = 1");
    NogoScan scan = nogo_scan(c.samples > 0 ? c.samples : 20, c.seed);
    Result r;
    r.json["subcommand"] = "nogo-scan";
    Json rows = Json::array();
    r.header = {"row", "consistent", "residual", "n_plus", "n_minus", "n_zero", "dichotomy_ok"};
    int k = 0;
    for (const auto& row : scan.rows) {
        Json j{{"family", row.family}, {"params", row.params}, {"consistent", row.consistent}};
        if (row.consistent) {
            j["residual"] = row.residual;
            j["signature"] = signature_json(row.signature);
        } else {
            j["reason"] = row.reason;
        }
        j["dichotomy_ok"] = row.dichotomy_ok;
        rows.push_back(j);
        r.rows.push_back({double(k++), row.consistent ? 1.0 : 0.0, row.residual, double(row.signature.n_plus),
                          double(row.signature.n_minus), double(row.signature.n_zero), row.dichotomy_ok ? 1.0 : 0.0});
    }
    r.json["rows"] = rows;
    r.json["all_ok"] = scan.all_ok;
    r.ok = scan.all_ok;
    return r;
}

Result run_kernel(const Config& c) {
    auto alg = AlgebraDescriptor::phase_space(c.n);
    const int samples = c.samples > 0 ? c.samples : 3;
    auto hs = random_hessians(c.n, samples, c.seed);
    CMat K = ferm_kernel(alg, hs);
    auto basis = svh_physical_basis(alg);
    CMat B(alg.fiber_dim(), basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) B.col(k) = basis[k];
    bool generic = K.cols() == c.n + 1;
    double angle = generic ? max_principal_angle(K, B) : std::numbers::pi / 2;
    std::vector<CVec> kv;
    for (int k = 0; k < K.cols(); ++k) kv.push_back(K.col(k));
    ClosureReport cl = closure_check(alg, svh_metric(alg), hs, basis);
    double sym = 0;
    for (const auto& f : symplectic_physical_family(alg))
        for (const auto& h : hs) {
            auto res = symplectic_physical_check(alg, f, h);
            sym = std::max({sym, res.last_two, res.mixed});
        }
    Result r;
    r.json["subcommand"] = "kernel";
    r.json["n"] = c.n;
    r.json["samples"] = samples;
    r.json["kernel_dim"] = K.cols();
    r.json["expected_dim"] = c.n + 1;
    // a larger kernel means a degenerate draw; flagged, not treated as a failure
    r.json["degenerate_draw"] = !generic;
    r.json["max_principal_angle"] = angle;
    r.json["svh_closure"] = {{"hermiticity", cl.hermiticity}, {"commutator", cl.commutator}};
    r.json["symplectic_family_residual"] = sym;
    r.json["svh_physical_basis"] = subspace_to_json(basis);
    r.header = {"basis_index", "svh_norm"};
    for (std::size_t k = 0; k < basis.size(); ++k) r.rows.push_back({double(k), basis[k].squaredNorm()});
    r.ok = (!generic || angle < 1e-8) && cl.hermiticity < 1e-10 && cl.commutator < 1e-10 && sym < 1e-12;
    return r;
}

Result run_evolve(const Config& c) {
    HamiltonianModel model = build_model(c);
    Metric m = build_metric(c);
    PhasePoint x0 = build_phi0(c);
    CVec f0 = build_fiber(c);
    FiberTrajectory ft = evolve_fiber(model, m, x0, f0, c.t, c.dt);
    const int D = int(f0.size());
    Result r;
    r.header = {"t"};
    for (int i = 1; i <= c.n; ++i) r.header.push_back("q" + std::to_string(i));
    for (int i = 1; i <= c.n; ++i) r.header.push_back("p" + std::to_string(i));
    r.header.push_back("norm");
    for (int s = 0; s < D; ++s) r.header.push_back("abs_psi_" + std::to_string(s));
    double drift = 0, zero_form = 0;
    for (std::size_t k = 0; k < ft.fiber.size(); ++k) {
        std::vector<double> row{ft.trajectory.t[k]};
        for (int a = 0; a < 2 * c.n; ++a) row.push_back(ft.trajectory.phi[k](a));
        row.push_back(ft.norm[k]);
        for (int s = 0; s < D; ++s) row.push_back(std::abs(ft.fiber[k](s)));
        r.rows.push_back(row);
        drift = std::max(drift, std::abs(ft.norm[k] - ft.norm[0]));
        zero_form = std::max(zero_form, std::abs(ft.fiber[k](0) - f0(0)));
    }
    r.json["subcommand"] = "evolve";
    r.json["potential"] = model.provenance();
    r.json["metric"] = family_name(m.family);
    r.json["t"] = c.t;
    r.json["dt"] = c.dt;
    r.json["final_phi"] = std::vector<double>(ft.jacobi.phi.data(), ft.jacobi.phi.data() + ft.jacobi.phi.size());
    r.json["final_fiber"] = state_to_json(ft.fiber.back());
    r.json["norm_initial"] = ft.norm.front();
    r.json["norm_final"] = ft.norm.back();
    r.json["norm_drift"] = drift;
    r.json["zero_form_drift"] = zero_form;
    Json mono = Json::array();
    for (int i = 0; i < ft.jacobi.monodromy.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < ft.jacobi.monodromy.cols(); ++j) row.push_back(ft.jacobi.monodromy(i, j));
        mono.push_back(row);
    }
    r.json["monodromy"] = mono;
    bool conserving = m.family == MetricFamily::gauge || m.family == MetricFamily::symplectic;
    r.ok = zero_form == 0.0 && (!conserving || drift < 1e-6 * std::max(1.0, std::abs(ft.norm[0])));
    return r;
}

Result run_lyapunov(const Config& c) {
    HamiltonianModel model = build_model(c);
    Result r;
    r.json["subcommand"] = "lyapunov";
    r.json["potential"] = model.provenance();
    r.json["T"] = c.t;
    r.json["dt"] = c.dt;
    r.json["renorm_interval"] = c.renorm;
    r.header = {"sample", "estimate"};
    if (c.samples <= 1) {
        double est = lyapunov(model, build_phi0(c), c.t, c.dt, c.renorm);
        r.json["estimate"] = est;
        r.rows.push_back({0, est});
    } else {
        auto ens = lyapunov_monte_carlo(model, c.samples, c.seed, c.box, c.t, c.dt, c.renorm);
        r.json["samples"] = c.samples;
        r.json["box"] = c.box;
        r.json["estimates"] = ens.estimates;
        r.json["mean"] = ens.mean;
        for (std::size_t k = 0; k < ens.estimates.size(); ++k) r.rows.push_back({double(k), ens.estimates[k]});
    }
    return r;
}

Result run_canonical(const Config& c) {
    HamiltonianModel model = build_model(c);
    Metric m = build_metric(c);
    LinearCanonical T = scaling_transform(c.alpha);
    if (!c.transform_file.empty()) {
        try {
            T = load_transform(c.transform_file);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        if (T.n_pairs() != c.n) throw UsageError("transform does not match --n");
    } else if (c.n != 1) {
        throw UsageError("--alpha scales one pair; pass --transform for n > 1");
    }
    PhasePoint x = build_phi0(c);
    InvarianceResult inv = hermiticity_invariance(model, m, T, x);
    Metric g2 = pushforward_metric(m, T);
    Result r;
    r.json["subcommand"] = "canonical";
    r.json["potential"] = model.provenance();
    r.json["metric"] = family_name(m.family);
    if (c.transform_file.empty()) r.json["alpha"] = c.alpha;
    r.json["residual_before"] = inv.before;
    r.json["residual_after"] = inv.after;
    r.json["lift_condition"] = inv.condition;
    r.json["residual_bounds"] = {inv.lower, inv.upper};
    r.json["signature_before"] = signature_json(signature(m));
    r.json["signature_after"] = signature_json(signature(g2));
    r.json["pushforward_metric"] = metric_to_json(g2);
    r.header = {"residual_before", "residual_after", "lift_condition"};
    r.rows.push_back({inv.before, inv.after, inv.condition});
    // a lift acting unitarily on the residual keeps it equal; in general it stays within the bounds
    r.ok = inv.within_bounds() && ((inv.before < 1e-12) == (inv.after < 1e-12)) && signature(m) == signature(g2);
    return r;
}

Result run_spectrum(const Config& c) {
    RVec ev = ring_liouvillian_spectrum(c.omega_freq, c.n_theta);
    Result r;
    r.json["subcommand"] = "spectrum";
    r.json["omega"] = c.omega_freq;
    r.json["n_theta"] = c.n_theta;
    std::vector<double> v(ev.data(), ev.data() + ev.size());
    for (double& x : v) x += 0.0;
    r.json["eigenvalues"] = v;
    r.header = {"index", "eigenvalue"};
    double dev = 0;
    for (int k = 0; k < ev.size(); ++k) {
        r.rows.push_back({double(k), ev(k)});
        if (c.omega_freq != 0) dev = std::max(dev, std::abs(ev(k) / c.omega_freq - std::round(ev(k) / c.omega_freq)));
    }
    r.json["max_distance_from_omega_k"] = dev * std::abs(c.omega_freq);
    r.ok = dev * std::abs(c.omega_freq) < 1e-10;
    return r;
}

void emit(const Result& r, const Config& c) {
    std::ostringstream os;
    if (c.format == "json") {
        Json j = r.json;
        j["ok"] = r.ok;
        os << j.dump(2) << '\n';
    } else {
        for (std::size_t k = 0; k < r.header.size(); ++k) os << (k ? "," : "") << r.header[k];
        os << '\n';
        for (const auto& row : r.rows) {
            for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << num(row[k]);
            os << '\n';
        }
    }
    if (c.out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw UsageError("cannot write " + c.out);
        f << os.str();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator formalism of classical mechanics on phase-space forms"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with option defaults (flags take precedence)");
    Config c;
    app.add_option("--n", c.n, "degrees of freedom")->check(CLI::Range(1, 3));
    app.add_option("--metric", c.metric, "svh | gauge | symplectic | A | B | C | file");
    app.add_option("--metric-params", c.metric_params, "b=..,theta=..,gamma_i=..,g03_re=..,g03_im=..");
    app.add_option("--metric-file", c.metric_files, "metric JSON file (identities: overrides a builtin)");
    app.add_option("--potential", c.potential, "harmonic | inverted | free | quartic | random | expression");
    app.add_option("--potential-params", c.potential_params, "m=..,w=..,lambda4=..");
    app.add_option("--phi0", c.phi0, "initial point q1..qn,p1..pn");
    app.add_option("--fiber", c.fiber, "initial fiber: xi or mask=re[:im],...");
    app.add_option("--t", c.t, "final time");
    app.add_option("--dt", c.dt, "RK4 step")->check(CLI::PositiveNumber);
    app.add_option("--renorm", c.renorm, "Lyapunov renormalization interval");
    app.add_option("--box", c.box, "Monte-Carlo sampling half-width");
    app.add_option("--alpha", c.alpha, "scaling transform parameter");
    app.add_option("--transform", c.transform_file, "JSON file {\"S\": 2n x 2n symplectic matrix}");
    app.add_option("--omega", c.omega_freq, "ring frequency");
    app.add_option("--n-theta", c.n_theta, "angle samples per ring")->check(CLI::Range(4, 4096));
    app.add_option("--samples", c.samples, "random samples");
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--out", c.out, "output path (stdout when absent)");
    app.add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    std::map<std::string, std::function<Result(const Config&)>> commands{
        {"identities", run_identities}, {"hermiticity", run_hermiticity}, {"nogo-scan", run_nogo},
        {"kernel", run_kernel},         {"evolve", run_evolve},           {"lyapunov", run_lyapunov},
        {"canonical", run_canonical},   {"spectrum", run_spectrum}};
    for (auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        for (auto& [name, fn] : commands)
            if (app.got_subcommand(name)) {
                Result r = fn(c);
                emit(r, c);
                return r.ok ? 0 : 1;
            }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
