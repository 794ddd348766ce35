#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "kvn/common.hpp"

namespace kvn {

using Mask = std::uint32_t;

// Generators c^{q_1}..c^{q_n}, c^{p_1}..c^{p_n} occupy the low bits of a mask.
// Odd parameters theta_k and their starred partners sit above them.
struct AlgebraDescriptor {
    int n_pairs = 0;
    int n_params = 0;
    int n_state = 0;
    Eigen::MatrixXi omega;

    static AlgebraDescriptor phase_space(int n, int params = 0);
    // one generator c, no (q,p) split; used by the single-variable tables
    static AlgebraDescriptor single_mode(int params = 0);

    int fiber_dim() const { return 1 << n_state; }
    int q(int i) const { return i; }
    int p(int i) const { return n_pairs + i; }
    int partner(int a) const;
    int param_bit(int k) const { return n_state + k; }
    int pstar_bit(int k) const { return n_state + n_params + k; }
    int total_bits() const { return n_state + 2 * n_params; }
    Mask state_bits() const { return (Mask{1} << n_state) - 1; }

    bool operator==(const AlgebraDescriptor& o) const {
        return n_pairs == o.n_pairs && n_params == o.n_params && n_state == o.n_state;
    }
};

// lower-index form omega_{ab}, inverse of omega^{ab}
Eigen::MatrixXi omega_lower(const AlgebraDescriptor& alg);

// Sign of e_m1 * e_m2 reordered into increasing index order; 0 if they overlap.
int product_sign(Mask m1, Mask m2);

// Element of the full Grassmann algebra (state generators and parameters).
// A monomial e_S theta_P is stored with state factors to the left.
class Multivector {
public:
    Multivector() = default;
    explicit Multivector(AlgebraDescriptor alg) : alg_(std::move(alg)) {}

    static Multivector scalar(const AlgebraDescriptor& alg, cplx z);
    static Multivector monomial(const AlgebraDescriptor& alg, Mask m, cplx z = 1.0);
    static Multivector generator(const AlgebraDescriptor& alg, int a);
    static Multivector param(const AlgebraDescriptor& alg, int k);
    static Multivector pstar(const AlgebraDescriptor& alg, int k);
    static Multivector from_vector(const AlgebraDescriptor& alg, const CVec& v);

    const AlgebraDescriptor& algebra() const { return alg_; }
    const std::map<Mask, cplx>& terms() const { return terms_; }

    cplx get(Mask m) const;
    void add(Mask m, cplx z);
    void prune(double tol = 0.0);

    bool is_zero(double tol = 0.0) const;
    bool is_pure_param() const;
    bool is_numeric() const;  // no parameter content at all
    // coefficient b_S of e_S b_S, a pure-parameter element
    Multivector coefficient(Mask state) const;
    CVec to_vector() const;  // numeric states only

    Multivector operator+(const Multivector& o) const;
    Multivector operator-(const Multivector& o) const;
    Multivector operator-() const;
    Multivector operator*(const Multivector& o) const;
    Multivector operator*(cplx z) const;
    Multivector& operator+=(const Multivector& o);

    double max_abs_diff(const Multivector& o) const;
    double max_abs() const;

private:
    AlgebraDescriptor alg_;
    std::map<Mask, cplx> terms_;
};

inline Multivector operator*(cplx z, const Multivector& m) { return m * z; }

enum class Parity { even, odd };

struct GrassmannOperator {
    AlgebraDescriptor algebra;
    CMat matrix;
    Parity parity = Parity::even;

    GrassmannOperator operator*(const GrassmannOperator& o) const;
    GrassmannOperator operator+(const GrassmannOperator& o) const;
    GrassmannOperator operator-(const GrassmannOperator& o) const;
    GrassmannOperator operator*(cplx z) const;
    // acts index-wise on the state factor of every monomial
    Multivector apply(const Multivector& psi) const;
};

GrassmannOperator wedge_op(const AlgebraDescriptor& alg, int a);
GrassmannOperator contraction_op(const AlgebraDescriptor& alg, int a);
// N_{q_1}..N_{q_n}, N_{p_1}..N_{p_n}
std::vector<GrassmannOperator> number_ops(const AlgebraDescriptor& alg);
// graded anticommutator of two odd operators
CMat anticommutator(const CMat& a, const CMat& b);

// Berezin integral over generator or parameter bit: the left derivative.
Multivector berezin_integrate(const Multivector& mv, int bit);
// Nested: integrate(mv, {x, y}) = int dx int dy mv, so y is done first.
Multivector berezin_integrate(const Multivector& mv, const std::vector<int>& bits);

Multivector exp_nilpotent(const Multivector& x);
CMat exp_nilpotent(const CMat& x);

// Sum of parameter-weighted operators  psi -> sum_k p_k (A_k psi).
struct ParamOperator {
    struct Term {
        Multivector weight;
        CMat op;
    };
    std::vector<Term> terms;

    Multivector apply(const Multivector& psi) const;
};
// exp(X) psi as a truncated series; X must be even and nilpotent.
Multivector exp_apply(const ParamOperator& x, const Multivector& psi);

// Order-reversing antilinear involution on pure-parameter elements.
Multivector conjugate(const Multivector& x);

}  // namespace kvn
