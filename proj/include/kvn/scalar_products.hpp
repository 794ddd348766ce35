#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kvn/grassmann.hpp"

namespace kvn {

enum class MetricFamily { svh, gauge, symplectic, generalA, generalB, generalC, custom };

std::string family_name(MetricFamily f);
MetricFamily family_from_name(const std::string& s);

struct Metric {
    AlgebraDescriptor algebra;
    CMat g;
    MetricFamily family = MetricFamily::custom;
    std::map<std::string, double> params;
};

Metric svh_metric(const AlgebraDescriptor& alg);
Metric gauge_metric(const AlgebraDescriptor& alg);
Metric symplectic_metric(const AlgebraDescriptor& alg);
// n = 1 closed forms; g03 is complex
Metric general_metric_A(double b);
Metric general_metric_B(double theta, double gamma_i, cplx g03);
Metric general_metric_C(double theta, double b, cplx g03);
// wraps a user matrix after checking g = g^H and invertibility
Metric custom_metric(const AlgebraDescriptor& alg, const CMat& g);

// Sum_ij conj(a_i) g_ij b_j with parameter-valued components.
Multivector inner(const Metric& m, const Multivector& phi, const Multivector& psi);
cplx inner(const Metric& m, const CVec& phi, const CVec& psi);

GrassmannOperator adjoint(const Metric& m, const GrassmannOperator& a);
CMat adjoint(const Metric& m, const CMat& a);
double hermiticity_residual(const Metric& m, const CMat& a);

struct Signature {
    int n_plus = 0, n_minus = 0, n_zero = 0;
    bool operator==(const Signature&) const = default;
};
Signature signature(const Metric& m);
RVec metric_eigenvalues(const Metric& m);

// X^dag = alpha X + beta Y,  Y^dag = gamma X + delta Y
struct PairRule {
    cplx alpha, beta, gamma, delta;

    static PairRule family1(double b);
    static PairRule family2(double theta, double gamma_i);
    static PairRule family3(double theta, double b);
};

// Dagger map over the ordered operator list c^0..c^{2n-1}, cbar_0..cbar_{2n-1}:
// row k holds the coefficients of (op_k)^dag.
struct ConjugationRule {
    AlgebraDescriptor algebra;
    CMat dagger;
    std::optional<PairRule> p_rule;  // X = c^p, Y = cbar_q   (n = 1)
    std::optional<PairRule> q_rule;  // X = c^q, Y = cbar_p

    static ConjugationRule svh(const AlgebraDescriptor& alg);
    static ConjugationRule gauge(const AlgebraDescriptor& alg);
    static ConjugationRule symplectic(const AlgebraDescriptor& alg);
    static ConjugationRule from_pairs(const PairRule& p_rule, const PairRule& q_rule);
};

enum class RuleClass { family1, family2, family3, other, inconsistent };
std::string rule_class_name(RuleClass c);

struct PairClassification {
    RuleClass tag = RuleClass::inconsistent;
    cplx beta_star_gamma;
    std::string failure;  // empty when consistent
};
PairClassification classify_pair(const PairRule& r);

struct ConjugationReport {
    bool consistent = false;
    std::optional<PairClassification> p, q;
    std::vector<std::string> failures;
};
ConjugationReport classify_conjugation(const ConjugationRule& rule);

struct Normalization {
    int row = 0, col = 0;
    cplx value = 1.0;
};

Metric metric_from_conjugation(const ConjugationRule& rule, const Normalization& norm,
                               MetricFamily family = MetricFamily::custom,
                               std::map<std::string, double> params = {});

}  // namespace kvn
