#include "kvn/nogo.hpp"

#include <algorithm>
#include <numbers>

#include "kvn/dynamics.hpp"
#include "kvn/lie_derivative.hpp"
#include "kvn/random.hpp"

namespace kvn {

namespace {

constexpr double kHermitian = 1e-10;

double max_residual(const Metric& m, const std::vector<RMat>& hessians) {
    double r = 0;
    for (const auto& h : hessians) r = std::max(r, hermiticity_residual(m, ferm_matrix(m.algebra, h).matrix));
    return r;
}

void finish(NogoRow& row, const Metric& m, const std::vector<RMat>& hessians) {
    row.consistent = true;
    row.residual = max_residual(m, hessians);
    row.signature = signature(m);
    // self-adjoint H_ferm forces an indefinite metric; a definite metric forces a residual
    if (row.residual < kHermitian) row.dichotomy_ok = row.signature.n_minus >= 1;
    else row.dichotomy_ok = true;
    if (row.signature.n_minus == 0 && row.signature.n_zero == 0) row.dichotomy_ok = row.residual >= kHermitian;
}

void attempt(NogoScan& scan, NogoRow row, const ConjugationRule& rule, const Normalization& norm, MetricFamily fam,
             const std::vector<RMat>& hessians) {
    try {
        Metric m = metric_from_conjugation(rule, norm, fam, row.params);
        finish(row, m, hessians);
    } catch (const Error& e) {
        row.consistent = false;
        row.reason = e.what();
    }
    scan.all_ok = scan.all_ok && row.dichotomy_ok;
    scan.rows.push_back(std::move(row));
}

}  // namespace

NogoScan nogo_scan(int samples, std::uint64_t seed) {
    if (samples < 1) throw Error("need at least one Hessian sample");
    const auto alg = AlgebraDescriptor::phase_space(1);
    const auto hessians = random_hessians(1, samples, seed);
    const std::vector<double> bs{-2, -1, -0.5, 0.5, 1, 2};
    const std::vector<double> thetas{0, std::numbers::pi / 4, std::numbers::pi / 2};
    const std::vector<cplx> g03s{I, -I, 1.0};
    NogoScan scan;

    {
        // SvH reference on an anharmonic potential
        NogoRow row{"svh", {}, false, "", 0, {}, true};
        auto model = quartic_model(1, 1.0);
        Rng g(seed);
        std::vector<RMat> hs;
        for (int k = 0; k < samples; ++k) {
            PhasePoint x(2);
            x << 0.5 + uniform01(g), 2 * uniform01(g) - 1;
            hs.push_back(model.hessian(x));
        }
        finish(row, svh_metric(alg), hs);
        scan.all_ok = scan.all_ok && row.dichotomy_ok;
        scan.rows.push_back(row);
    }
    for (double b : bs) {
        NogoRow row{"A", {{"b", b}}, false, "", 0, {}, true};
        auto rule = ConjugationRule::from_pairs(PairRule::family1(b), PairRule::family1(-b));
        attempt(scan, row, rule, {0, 0, 1.0}, MetricFamily::generalA, hessians);
    }
    for (double th : thetas)
        for (double gi : {0.0, 1.0})
            for (cplx g03 : g03s) {
                NogoRow row{"B", {{"theta", th}, {"gamma_i", gi}, {"g03_re", g03.real() + 0.0}, {"g03_im", g03.imag() + 0.0}},
                            false, "", 0, {}, true};
                auto rule = ConjugationRule::from_pairs(PairRule::family2(th, gi), PairRule::family2(th, -gi));
                attempt(scan, row, rule, {0, 3, g03}, MetricFamily::generalB, hessians);
            }
    std::vector<double> cbs{0};
    cbs.insert(cbs.end(), bs.begin(), bs.end());
    for (double th : thetas)
        for (double b : cbs)
            for (cplx g03 : g03s) {
                NogoRow row{"C", {{"theta", th}, {"b", b}, {"g03_re", g03.real() + 0.0}, {"g03_im", g03.imag() + 0.0}},
                            false, "", 0, {}, true};
                auto rule = ConjugationRule::from_pairs(PairRule::family3(th, b), PairRule::family3(th, -b));
                attempt(scan, row, rule, {0, 3, g03}, MetricFamily::generalC, hessians);
            }
    return scan;
}

}  // namespace kvn
