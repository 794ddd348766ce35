#include "kvn/grassmann.hpp"

#include <bit>
#include <cmath>

namespace kvn {

AlgebraDescriptor AlgebraDescriptor::phase_space(int n, int params) {
    if (n < 0 || params < 0) throw Error("negative algebra size");
    if (2 * n + 2 * params > 30) throw Error("algebra too large for 32-bit masks");
    AlgebraDescriptor a;
    a.n_pairs = n;
    a.n_params = params;
    a.n_state = 2 * n;
    a.omega = Eigen::MatrixXi::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        a.omega(i, n + i) = 1;
        a.omega(n + i, i) = -1;
    }
    return a;
}

AlgebraDescriptor AlgebraDescriptor::single_mode(int params) {
    if (params < 0 || 1 + 2 * params > 30) throw Error("bad parameter count");
    AlgebraDescriptor a;
    a.n_params = params;
    a.n_state = 1;
    a.omega = Eigen::MatrixXi::Zero(0, 0);
    return a;
}

int AlgebraDescriptor::partner(int a) const {
    if (a < 0 || a >= 2 * n_pairs) throw Error("generator index out of range");
    return a < n_pairs ? a + n_pairs : a - n_pairs;
}

Eigen::MatrixXi omega_lower(const AlgebraDescriptor& alg) { return -alg.omega; }

int product_sign(Mask m1, Mask m2) {
    if (m1 & m2) return 0;
    int swaps = 0;
    Mask rest = m2;
    while (rest) {
        int j = std::countr_zero(rest);
        rest &= rest - 1;
        Mask above = m1 & ~((Mask{2} << j) - 1);
        swaps += std::popcount(above);
    }
    return (swaps & 1) ? -1 : 1;
}

// ---- Multivector

Multivector Multivector::scalar(const AlgebraDescriptor& alg, cplx z) {
    return monomial(alg, 0, z);
}

Multivector Multivector::monomial(const AlgebraDescriptor& alg, Mask m, cplx z) {
    Multivector r(alg);
    r.add(m, z);
    return r;
}

Multivector Multivector::generator(const AlgebraDescriptor& alg, int a) {
    if (a < 0 || a >= alg.n_state) throw Error("generator index out of range");
    return monomial(alg, Mask{1} << a);
}

Multivector Multivector::param(const AlgebraDescriptor& alg, int k) {
    if (k < 0 || k >= alg.n_params) throw Error("parameter index out of range");
    return monomial(alg, Mask{1} << alg.param_bit(k));
}

Multivector Multivector::pstar(const AlgebraDescriptor& alg, int k) {
    if (k < 0 || k >= alg.n_params) throw Error("parameter index out of range");
    return monomial(alg, Mask{1} << alg.pstar_bit(k));
}

Multivector Multivector::from_vector(const AlgebraDescriptor& alg, const CVec& v) {
    if (v.size() != alg.fiber_dim()) throw Error("vector size does not match fiber");
    Multivector r(alg);
    for (int i = 0; i < v.size(); ++i) r.add(static_cast<Mask>(i), v(i));
    return r;
}

cplx Multivector::get(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? cplx{} : it->second;
}

void Multivector::add(Mask m, cplx z) {
    if (z == cplx{}) return;
    auto [it, fresh] = terms_.emplace(m, z);
    if (!fresh) {
        it->second += z;
        if (it->second == cplx{}) terms_.erase(it);
    }
}

void Multivector::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = std::abs(it->second) <= tol ? terms_.erase(it) : std::next(it);
}

bool Multivector::is_zero(double tol) const {
    for (auto& [m, z] : terms_)
        if (std::abs(z) > tol) return false;
    return true;
}

bool Multivector::is_pure_param() const {
    for (auto& [m, z] : terms_)
        if (m & alg_.state_bits()) return false;
    return true;
}

bool Multivector::is_numeric() const {
    for (auto& [m, z] : terms_)
        if (m & ~alg_.state_bits()) return false;
    return true;
}

Multivector Multivector::coefficient(Mask state) const {
    Multivector r(alg_);
    Mask sb = alg_.state_bits();
    for (auto& [m, z] : terms_)
        if ((m & sb) == state) r.add(m & ~sb, z);
    return r;
}

CVec Multivector::to_vector() const {
    if (!is_numeric()) throw Error("state carries parameter content");
    CVec v = CVec::Zero(alg_.fiber_dim());
    for (auto& [m, z] : terms_) v(m) = z;
    return v;
}

Multivector Multivector::operator+(const Multivector& o) const {
    Multivector r = *this;
    r += o;
    return r;
}

Multivector& Multivector::operator+=(const Multivector& o) {
    for (auto& [m, z] : o.terms_) add(m, z);
    return *this;
}

Multivector Multivector::operator-() const { return *this * cplx{-1.0}; }

Multivector Multivector::operator-(const Multivector& o) const { return *this + (-o); }

Multivector Multivector::operator*(cplx z) const {
    Multivector r(alg_);
    if (z == cplx{}) return r;
    for (auto& [m, c] : terms_) r.terms_.emplace(m, c * z);
    return r;
}

Multivector Multivector::operator*(const Multivector& o) const {
    Multivector r(alg_);
    for (auto& [m1, z1] : terms_)
        for (auto& [m2, z2] : o.terms_) {
            int s = product_sign(m1, m2);
            if (s) r.add(m1 | m2, double(s) * z1 * z2);
        }
    return r;
}

double Multivector::max_abs_diff(const Multivector& o) const { return (*this - o).max_abs(); }

double Multivector::max_abs() const {
    double d = 0;
    for (auto& [m, z] : terms_) d = std::max(d, std::abs(z));
    return d;
}

// ---- operators

GrassmannOperator GrassmannOperator::operator*(const GrassmannOperator& o) const {
    Parity p = (parity == o.parity) ? Parity::even : Parity::odd;
    return {algebra, matrix * o.matrix, p};
}

GrassmannOperator GrassmannOperator::operator+(const GrassmannOperator& o) const {
    return {algebra, matrix + o.matrix, parity};
}

GrassmannOperator GrassmannOperator::operator-(const GrassmannOperator& o) const {
    return {algebra, matrix - o.matrix, parity};
}

GrassmannOperator GrassmannOperator::operator*(cplx z) const { return {algebra, matrix * z, parity}; }

static Multivector apply_matrix(const CMat& A, const Multivector& psi) {
    const auto& alg = psi.algebra();
    Mask sb = alg.state_bits();
    Multivector r(alg);
    for (auto& [m, z] : psi.terms()) {
        Mask s = m & sb, rest = m & ~sb;
        for (int i = 0; i < A.rows(); ++i) {
            cplx a = A(i, s);
            if (a != cplx{}) r.add(static_cast<Mask>(i) | rest, a * z);
        }
    }
    return r;
}

Multivector GrassmannOperator::apply(const Multivector& psi) const {
    if (matrix.rows() != psi.algebra().fiber_dim()) throw Error("operator/state dimension mismatch");
    return apply_matrix(matrix, psi);
}

GrassmannOperator wedge_op(const AlgebraDescriptor& alg, int a) {
    if (a < 0 || a >= alg.n_state) throw Error("generator index out of range");
    int N = alg.fiber_dim();
    CMat m = CMat::Zero(N, N);
    Mask bit = Mask{1} << a;
    for (int b = 0; b < N; ++b) {
        Mask mb = static_cast<Mask>(b);
        if (mb & bit) continue;
        int below = std::popcount(mb & (bit - 1));
        m(mb | bit, b) = (below & 1) ? -1.0 : 1.0;
    }
    return {alg, m, Parity::odd};
}

GrassmannOperator contraction_op(const AlgebraDescriptor& alg, int a) {
    if (a < 0 || a >= alg.n_state) throw Error("generator index out of range");
    int N = alg.fiber_dim();
    CMat m = CMat::Zero(N, N);
    Mask bit = Mask{1} << a;
    for (int b = 0; b < N; ++b) {
        Mask mb = static_cast<Mask>(b);
        if (!(mb & bit)) continue;
        int below = std::popcount(mb & (bit - 1));
        m(mb & ~bit, b) = (below & 1) ? -1.0 : 1.0;
    }
    return {alg, m, Parity::odd};
}

std::vector<GrassmannOperator> number_ops(const AlgebraDescriptor& alg) {
    std::vector<GrassmannOperator> out;
    for (int a = 0; a < alg.n_state; ++a) out.push_back(wedge_op(alg, a) * contraction_op(alg, a));
    return out;
}

CMat anticommutator(const CMat& a, const CMat& b) { return a * b + b * a; }

// ---- Berezin

Multivector berezin_integrate(const Multivector& mv, int bit) {
    const auto& alg = mv.algebra();
    if (bit < 0 || bit >= alg.total_bits()) throw Error("integration variable out of range");
    Mask b = Mask{1} << bit;
    Multivector r(alg);
    for (auto& [m, z] : mv.terms()) {
        if (!(m & b)) continue;
        int below = std::popcount(m & (b - 1));
        r.add(m & ~b, (below & 1) ? -z : z);
    }
    return r;
}

Multivector berezin_integrate(const Multivector& mv, const std::vector<int>& bits) {
    Multivector r = mv;
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) r = berezin_integrate(r, *it);
    return r;
}

// ---- exponentials

Multivector exp_nilpotent(const Multivector& x) {
    const auto& alg = x.algebra();
    Multivector sum = Multivector::scalar(alg, 1.0);
    Multivector term = sum;
    int cap = alg.total_bits() + 1;
    for (int k = 1; k <= cap; ++k) {
        term = term * x * cplx{1.0 / k};
        if (term.is_zero()) return sum;
        sum += term;
    }
    throw Error("exp_nilpotent: argument is not nilpotent");
}

CMat exp_nilpotent(const CMat& x) {
    CMat sum = CMat::Identity(x.rows(), x.cols());
    CMat term = sum;
    for (int k = 1; k <= x.rows() + 1; ++k) {
        term = term * x / double(k);
        if (term.isZero(0.0)) return sum;
        sum += term;
    }
    throw Error("exp_nilpotent: matrix is not nilpotent");
}

Multivector ParamOperator::apply(const Multivector& psi) const {
    Multivector r(psi.algebra());
    for (auto& t : terms) r += t.weight * apply_matrix(t.op, psi);
    return r;
}

Multivector exp_apply(const ParamOperator& x, const Multivector& psi) {
    Multivector sum = psi, term = psi;
    int cap = psi.algebra().total_bits() + 2;
    for (int k = 1; k <= cap; ++k) {
        term = x.apply(term) * cplx{1.0 / k};
        if (term.is_zero()) return sum;
        sum += term;
    }
    throw Error("exp_apply: generator is not nilpotent");
}

Multivector conjugate(const Multivector& x) {
    if (!x.is_pure_param()) throw Error("conjugate: only pure-parameter elements");
    const auto& alg = x.algebra();
    auto star = [&](int bit) {
        int k = bit - alg.n_state;
        return k < alg.n_params ? alg.pstar_bit(k) : alg.param_bit(k - alg.n_params);
    };
    Multivector r(alg);
    for (auto& [m, z] : x.terms()) {
        Multivector prod = Multivector::scalar(alg, std::conj(z));
        // reversed order: highest original bit comes first
        for (int bit = alg.total_bits() - 1; bit >= 0; --bit)
            if (m & (Mask{1} << bit)) prod = prod * Multivector::monomial(alg, Mask{1} << star(bit));
        r += prod;
    }
    return r;
}

}  // namespace kvn
