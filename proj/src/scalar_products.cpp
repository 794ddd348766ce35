#include "kvn/scalar_products.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace kvn {

std::string family_name(MetricFamily f) {
    switch (f) {
        case MetricFamily::svh: return "svh";
        case MetricFamily::gauge: return "gauge";
        case MetricFamily::symplectic: return "symplectic";
        case MetricFamily::generalA: return "generalA";
        case MetricFamily::generalB: return "generalB";
        case MetricFamily::generalC: return "generalC";
        case MetricFamily::custom: return "custom";
    }
    return "custom";
}

MetricFamily family_from_name(const std::string& s) {
    for (auto f : {MetricFamily::svh, MetricFamily::gauge, MetricFamily::symplectic, MetricFamily::generalA,
                   MetricFamily::generalB, MetricFamily::generalC, MetricFamily::custom})
        if (family_name(f) == s) return f;
    throw Error("unknown metric family '" + s + "'");
}

namespace {

void check_metric(const CMat& g) {
    double scale = std::max(1.0, g.norm());
    if ((g - g.adjoint()).norm() > 1e-12 * scale) throw Error("metric is not conjugate-symmetric");
    Eigen::SelfAdjointEigenSolver<CMat> es(g);
    if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-10 * scale) throw Error("metric is singular");
}

// sign of the permutation sorting v into increasing order
int sort_sign(std::vector<int> v) {
    int s = 1;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = 0; j + 1 < v.size() - i; ++j)
            if (v[j] > v[j + 1]) {
                std::swap(v[j], v[j + 1]);
                s = -s;
            }
    return s;
}

cplx ipow(int m) {
    static const cplx t[4] = {1.0, I, -1.0, -I};
    return t[m & 3];
}

}  // namespace

Metric svh_metric(const AlgebraDescriptor& alg) {
    return {alg, CMat::Identity(alg.fiber_dim(), alg.fiber_dim()), MetricFamily::svh, {}};
}

Metric symplectic_metric(const AlgebraDescriptor& alg) {
    if (alg.n_state != 2 * alg.n_pairs) throw Error("symplectic metric needs a phase-space algebra");
    int N = alg.fiber_dim();
    CMat g = CMat::Zero(N, N);
    for (int A = 0; A < N; ++A) {
        std::vector<int> partners;
        int w = 1;
        for (int a = 0; a < alg.n_state; ++a)
            if (A & (1 << a)) {
                int b = alg.partner(a);
                partners.push_back(b);
                w *= alg.omega(a, b);
            }
        Mask B = 0;
        for (int b : partners) B |= Mask{1} << b;
        g(A, B) = ipow(int(partners.size())) * double(w * sort_sign(partners));
    }
    return {alg, g, MetricFamily::symplectic, {}};
}

Metric gauge_metric(const AlgebraDescriptor& alg) {
    if (alg.n_state == 1) {
        CMat g(2, 2);
        g << 0, 1, 1, 0;
        return {alg, g, MetricFamily::gauge, {}};
    }
    if (alg.n_pairs == 0) return {alg, CMat::Identity(1, 1), MetricFamily::gauge, {}};
    if (alg.n_pairs == 1) {
        CMat g = CMat::Zero(4, 4);
        g(0, 3) = -I;
        g(1, 2) = -I;
        g(2, 1) = I;
        g(3, 0) = I;
        return {alg, g, MetricFamily::gauge, {}};
    }
    // larger fibers: anchor <0-..0-|0+..0+> = i^n and solve the conjugation rules;
    // a plain i has no conjugate-symmetric solution at even n
    Normalization norm{alg.fiber_dim() - 1, 0, ipow(alg.n_pairs)};
    return metric_from_conjugation(ConjugationRule::gauge(alg), norm, MetricFamily::gauge);
}

Metric general_metric_A(double b) {
    if (b == 0.0 || !std::isfinite(b)) throw Error("family A needs real nonzero b");
    CMat g = CMat::Zero(4, 4);
    g(0, 0) = 1.0;
    g(1, 2) = -I * b;
    g(2, 1) = I * b;
    g(3, 3) = -b * b;
    Metric m{AlgebraDescriptor::phase_space(1), g, MetricFamily::generalA, {{"b", b}}};
    check_metric(m.g);
    return m;
}

static CMat family_bc(double theta, cplx g03) {
    cplx e = std::exp(I * theta);
    CMat g = CMat::Zero(4, 4);
    g(0, 3) = g03;
    g(1, 2) = g03 * e;
    g(2, 1) = -g03 * e;
    g(3, 0) = -g03 * e * e;
    return g;
}

Metric general_metric_B(double theta, double gamma_i, cplx g03) {
    if (g03 == cplx{}) throw Error("family B needs nonzero g03");
    CMat g = family_bc(theta, g03);
    g(0, 0) = I * g03 * std::exp(I * theta) * gamma_i;
    check_metric(g);
    return {AlgebraDescriptor::phase_space(1), g, MetricFamily::generalB,
            {{"theta", theta}, {"gamma_i", gamma_i}, {"g03_re", g03.real()}, {"g03_im", g03.imag()}}};
}

Metric general_metric_C(double theta, double b, cplx g03) {
    if (g03 == cplx{}) throw Error("family C needs nonzero g03");
    CMat g = family_bc(theta, g03);
    g(3, 3) = -I * g03 * std::exp(I * theta) * b;
    check_metric(g);
    return {AlgebraDescriptor::phase_space(1), g, MetricFamily::generalC,
            {{"theta", theta}, {"b", b}, {"g03_re", g03.real()}, {"g03_im", g03.imag()}}};
}

Metric custom_metric(const AlgebraDescriptor& alg, const CMat& g) {
    if (g.rows() != alg.fiber_dim() || g.cols() != alg.fiber_dim()) throw Error("metric size does not match fiber");
    check_metric(g);
    return {alg, g, MetricFamily::custom, {}};
}

// 1 when g only pairs monomials of opposite parity (a Grassmann-odd form)
static bool odd_form(const CMat& g) {
    bool odd = false, even = false;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            if (g(i, j) != cplx{}) {
                if ((std::popcount(unsigned(i)) + std::popcount(unsigned(j))) & 1) odd = true;
                else even = true;
            }
    return odd && !even;
}

// a -> (-1)^deg(a) a, monomial by monomial
static Multivector grade_flip(const Multivector& a) {
    Multivector r(a.algebra());
    for (auto& [m, z] : a.terms()) r.add(m, (std::popcount(m) & 1) ? -z : z);
    return r;
}

Multivector inner(const Metric& m, const Multivector& phi, const Multivector& psi) {
    const auto& alg = phi.algebra();
    int N = alg.fiber_dim();
    if (m.g.rows() != N) throw Error("metric/algebra mismatch");
    // an odd form picks up the parity of the bra coefficient moving past it
    bool odd = odd_form(m.g);
    std::vector<Multivector> a(N), b(N);
    for (int i = 0; i < N; ++i) {
        a[i] = conjugate(phi.coefficient(i));
        if (odd) a[i] = grade_flip(a[i]);
        b[i] = psi.coefficient(i);
    }
    Multivector r(alg);
    for (int i = 0; i < N; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; j < N; ++j)
            if (m.g(i, j) != cplx{} && !b[j].is_zero()) r += a[i] * b[j] * m.g(i, j);
    }
    return r;
}

cplx inner(const Metric& m, const CVec& phi, const CVec& psi) { return phi.dot(m.g * psi); }

CMat adjoint(const Metric& m, const CMat& a) {
    Eigen::PartialPivLU<CMat> lu(m.g);
    if (std::abs(lu.determinant()) == 0.0) throw Error("singular metric");
    return lu.solve(a.adjoint() * m.g);
}

GrassmannOperator adjoint(const Metric& m, const GrassmannOperator& a) {
    return {a.algebra, adjoint(m, a.matrix), a.parity};
}

double hermiticity_residual(const Metric& m, const CMat& a) {
    CMat ga = m.g * a;
    return (ga - ga.adjoint()).norm();
}

RVec metric_eigenvalues(const Metric& m) {
    CMat h = (m.g + m.g.adjoint()) * 0.5;
    return Eigen::SelfAdjointEigenSolver<CMat>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

Signature signature(const Metric& m) {
    RVec ev = metric_eigenvalues(m);
    double tol = 1e-10 * m.g.norm();
    Signature s;
    for (double l : ev) {
        if (std::abs(l) < tol) ++s.n_zero;
        else if (l > 0) ++s.n_plus;
        else ++s.n_minus;
    }
    return s;
}

// ---- conjugation rules

PairRule PairRule::family1(double b) {
    if (b == 0.0) throw Error("family 1 needs b != 0");
    return {0.0, I * b, I / b, 0.0};
}

PairRule PairRule::family2(double theta, double gamma_i) {
    return {std::exp(I * theta), 0.0, I * gamma_i, std::exp(-I * theta)};
}

PairRule PairRule::family3(double theta, double b) {
    return {std::exp(I * theta), I * b, 0.0, std::exp(-I * theta)};
}

ConjugationRule ConjugationRule::svh(const AlgebraDescriptor& alg) {
    int m = alg.n_state;
    CMat d = CMat::Zero(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) {
        d(a, m + a) = 1.0;
        d(m + a, a) = 1.0;
    }
    return {alg, d, {}, {}};
}

ConjugationRule ConjugationRule::gauge(const AlgebraDescriptor& alg) {
    int m = alg.n_state;
    return {alg, CMat::Identity(2 * m, 2 * m), {}, {}};
}

ConjugationRule ConjugationRule::symplectic(const AlgebraDescriptor& alg) {
    int m = alg.n_state;
    Eigen::MatrixXi lo = omega_lower(alg);
    CMat d = CMat::Zero(2 * m, 2 * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            d(a, m + b) = I * double(alg.omega(a, b));
            d(m + a, b) = I * double(lo(a, b));
        }
    return {alg, d, {}, {}};
}

ConjugationRule ConjugationRule::from_pairs(const PairRule& pr, const PairRule& qr) {
    // operator order: c^q, c^p, cbar_q, cbar_p
    CMat d = CMat::Zero(4, 4);
    d(1, 1) = pr.alpha;
    d(1, 2) = pr.beta;
    d(2, 1) = pr.gamma;
    d(2, 2) = pr.delta;
    d(0, 0) = qr.alpha;
    d(0, 3) = qr.beta;
    d(3, 0) = qr.gamma;
    d(3, 3) = qr.delta;
    return {AlgebraDescriptor::phase_space(1), d, pr, qr};
}

std::string rule_class_name(RuleClass c) {
    switch (c) {
        case RuleClass::family1: return "family1";
        case RuleClass::family2: return "family2";
        case RuleClass::family3: return "family3";
        case RuleClass::other: return "other";
        case RuleClass::inconsistent: return "inconsistent";
    }
    return "inconsistent";
}

PairClassification classify_pair(const PairRule& r) {
    const double tol = 1e-12;
    auto [al, be, ga, de] = r;
    PairClassification out;
    out.beta_star_gamma = std::conj(be) * ga;
    struct Check {
        const char* name;
        cplx value, target;
    };
    const Check checks[] = {
        {"alpha*delta - beta*gamma = 1", al * de - be * ga, 1.0},
        {"|alpha|^2 + beta^* gamma = 1", std::norm(al) + std::conj(be) * ga, 1.0},
        {"alpha^* beta + beta^* delta = 0", std::conj(al) * be + std::conj(be) * de, 0.0},
        {"alpha gamma^* + delta^* gamma = 0", al * std::conj(ga) + std::conj(de) * ga, 0.0},
        {"gamma^* beta + |delta|^2 = 1", std::conj(ga) * be + std::norm(de), 1.0},
    };
    for (auto& c : checks)
        if (std::abs(c.value - c.target) > tol) {
            out.failure = c.name;
            return out;
        }
    cplx z = out.beta_star_gamma;
    if (std::abs(z - 1.0) < tol) out.tag = RuleClass::family1;
    else if (std::abs(be) < tol) out.tag = RuleClass::family2;
    else if (std::abs(ga) < tol) out.tag = RuleClass::family3;
    else out.tag = RuleClass::other;
    return out;
}

ConjugationReport classify_conjugation(const ConjugationRule& rule) {
    ConjugationReport rep;
    if (rule.p_rule) {
        rep.p = classify_pair(*rule.p_rule);
        if (!rep.p->failure.empty()) rep.failures.push_back("p rule: " + rep.p->failure);
    }
    if (rule.q_rule) {
        rep.q = classify_pair(*rule.q_rule);
        if (!rep.q->failure.empty()) rep.failures.push_back("q rule: " + rep.q->failure);
    }
    // daggered operators must keep the canonical anticommutators
    const auto& alg = rule.algebra;
    int m = alg.n_state;
    const CMat& d = rule.dagger;
    if (d.rows() != 2 * m || d.cols() != 2 * m) throw Error("dagger map has wrong size");
    CMat pairing = CMat::Zero(2 * m, 2 * m);
    pairing.topRightCorner(m, m) = CMat::Identity(m, m);
    pairing.bottomLeftCorner(m, m) = CMat::Identity(m, m);
    CMat anti = d * pairing * d.transpose();
    auto name = [&](int k) {
        std::string base = k < m ? "c" : "cbar";
        int a = k % m;
        std::string idx = alg.n_pairs ? (a < alg.n_pairs ? "q" : "p") + std::to_string(a % alg.n_pairs + 1)
                                      : std::to_string(a);
        return base + "_" + idx + "^dag";
    };
    for (int k = 0; k < 2 * m; ++k)
        for (int l = k; l < 2 * m; ++l) {
            cplx want = pairing(k, l);
            if (std::abs(anti(k, l) - want) > 1e-12) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "[%s, %s]_+ = %.6g%+.6gi, expected %g", name(k).c_str(),
                              name(l).c_str(), anti(k, l).real(), anti(k, l).imag(), want.real());
                rep.failures.emplace_back(buf);
            }
        }
    // involution: (A^dag)^dag = A
    if ((d.conjugate() * d - CMat::Identity(2 * m, 2 * m)).norm() > 1e-12)
        rep.failures.emplace_back("dagger is not an involution");
    rep.consistent = rep.failures.empty();
    return rep;
}

Metric metric_from_conjugation(const ConjugationRule& rule, const Normalization& norm, MetricFamily family,
                               std::map<std::string, double> params) {
    auto rep = classify_conjugation(rule);
    if (!rep.consistent) throw Error("inconsistent conjugation rule: " + rep.failures.front());
    const auto& alg = rule.algebra;
    int m = alg.n_state, N = alg.fiber_dim();
    std::vector<CMat> ops;
    for (int a = 0; a < m; ++a) ops.push_back(wedge_op(alg, a).matrix);
    for (int a = 0; a < m; ++a) ops.push_back(contraction_op(alg, a).matrix);
    std::vector<CMat> dag(2 * m);
    for (int k = 0; k < 2 * m; ++k) {
        dag[k] = CMat::Zero(N, N);
        for (int l = 0; l < 2 * m; ++l)
            if (rule.dagger(k, l) != cplx{}) dag[k] += rule.dagger(k, l) * ops[l];
    }
    // row S of g is r * W_S, r = first row, W_S = R_{s_k} .. R_{s_1}
    std::vector<CMat> W(N);
    W[0] = CMat::Identity(N, N);
    for (int S = 1; S < N; ++S) {
        int low = std::countr_zero(static_cast<unsigned>(S));
        W[S] = W[S & (S - 1)] * dag[low];
    }
    auto build = [&](const CVec& r) {
        CMat g(N, N);
        for (int S = 0; S < N; ++S) g.row(S) = r.transpose() * W[S];
        return g;
    };
    // every rule gives O_k^H g - g R_k = 0, linear in r
    const int rows_per = N * N;
    CMat A(rows_per * 2 * m, N);
    for (int U = 0; U < N; ++U) {
        CVec e = CVec::Zero(N);
        e(U) = 1.0;
        CMat g = build(e);
        for (int k = 0; k < 2 * m; ++k) {
            CMat res = ops[k].adjoint() * g - g * dag[k];
            A.block(k * rows_per, U, rows_per, 1) = Eigen::Map<CVec>(res.data(), rows_per);
        }
    }
    CMat ata = A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<CMat> es(ata);
    double top = std::max(es.eigenvalues().maxCoeff(), 1.0);
    std::vector<int> null;
    for (int i = 0; i < N; ++i)
        if (es.eigenvalues()(i) < 1e-13 * top) null.push_back(i);
    if (null.empty()) throw Error("conjugation rule admits no nonzero metric");
    if (null.size() > 1)
        throw Error("metric solution space has dimension " + std::to_string(null.size()) +
                    "; one normalization cannot pin it");
    CMat g1 = build(es.eigenvectors().col(null[0]));
    cplx anchor = g1(norm.row, norm.col);
    if (std::abs(anchor) < 1e-12 * g1.norm()) throw Error("normalization entry vanishes on the solution space");
    CMat g = g1 * (norm.value / anchor);
    g = g.unaryExpr([](cplx z) {
        auto snap = [](double x) { return std::abs(x) < 1e-13 ? 0.0 : x; };
        return cplx{snap(z.real()), snap(z.imag())};
    });
    if ((g - g.adjoint()).norm() > 1e-10 * g.norm())
        throw Error("normalization infeasible: no conjugate-symmetric metric with that anchor");
    g = (g + g.adjoint()) * 0.5;
    check_metric(g);
    return {alg, g, family, std::move(params)};
}

}  // namespace kvn
