#include "kvn/physical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kvn {

namespace {

const double rs2 = 1 / std::numbers::sqrt2;

void require_phase_space(const AlgebraDescriptor& alg) {
    if (alg.n_pairs < 1 || alg.n_state != 2 * alg.n_pairs) throw Error("needs a phase-space algebra");
}

std::vector<CMat> base_ops(const AlgebraDescriptor& alg) {
    std::vector<CMat> ops;
    for (int a = 0; a < alg.n_state; ++a) ops.push_back(wedge_op(alg, a).matrix);
    for (int a = 0; a < alg.n_state; ++a) ops.push_back(contraction_op(alg, a).matrix);
    return ops;
}

CMat xi_generator_matrix(int n) {
    CMat T = CMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        T(i, i) = rs2;
        T(i, n + i) = I * rs2;
        T(n + i, i) = rs2;
        T(n + i, n + i) = -I * rs2;
    }
    return T;
}

}  // namespace

CMat exterior_lift(const AlgebraDescriptor& alg, const CMat& A) {
    const int N = alg.n_state;
    if (A.rows() != N || A.cols() != N) throw Error("generator matrix has wrong size");
    AlgebraDescriptor plain = alg;
    plain.n_params = 0;
    std::vector<Multivector> image;
    for (int a = 0; a < N; ++a) {
        Multivector v(plain);
        for (int k = 0; k < N; ++k) v.add(Mask{1} << k, A(k, a));
        image.push_back(v);
    }
    const int D = plain.fiber_dim();
    CMat L = CMat::Zero(D, D);
    for (int S = 0; S < D; ++S) {
        Multivector prod = Multivector::scalar(plain, 1.0);
        for (int a = 0; a < N; ++a)
            if (S & (1 << a)) prod = prod * image[a];
        for (auto& [m, z] : prod.terms()) L(m, S) = z;
    }
    return L;
}

std::vector<CMat> BasisChange::operators() const {
    auto ops = base_ops(algebra);
    std::vector<CMat> out;
    for (int k = 0; k < op_map.rows(); ++k) {
        CMat m = CMat::Zero(algebra.fiber_dim(), algebra.fiber_dim());
        for (int j = 0; j < op_map.cols(); ++j)
            if (op_map(k, j) != cplx{}) m += op_map(k, j) * ops[j];
        out.push_back(m);
    }
    return out;
}

CMat ferm_kernel(const AlgebraDescriptor& alg, const std::vector<RMat>& hessians, double tol) {
    if (hessians.empty()) throw Error("need at least one Hessian");
    const int D = alg.fiber_dim();
    CMat stack(D * hessians.size(), D);
    for (std::size_t k = 0; k < hessians.size(); ++k) stack.middleRows(k * D, D) = ferm_matrix(alg, hessians[k]).matrix;
    Eigen::JacobiSVD<CMat> svd(stack, Eigen::ComputeFullV);
    const RVec& s = svd.singularValues();
    double scale = std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (int k = 0; k < s.size(); ++k)
        if (s(k) > tol * scale) ++rank;
    return svd.matrixV().rightCols(D - rank);
}

std::vector<CVec> svh_physical_basis(const AlgebraDescriptor& alg) {
    require_phase_space(alg);
    Multivector omega(alg);
    for (int i = 0; i < alg.n_pairs; ++i)
        omega += Multivector::generator(alg, alg.q(i)) * Multivector::generator(alg, alg.p(i));
    std::vector<CVec> out;
    Multivector power = Multivector::scalar(alg, 1.0);
    for (int k = 0; k <= alg.n_pairs; ++k) {
        out.push_back(power.to_vector());
        power = power * omega * cplx{1.0 / (k + 1)};
    }
    return out;
}

double max_principal_angle(const CMat& a, const CMat& b) {
    if (a.cols() != b.cols()) return std::numbers::pi / 2;
    if (a.cols() == 0) return 0;
    CMat qa = Eigen::HouseholderQR<CMat>(a).householderQ() * CMat::Identity(a.rows(), a.cols());
    CMat qb = Eigen::HouseholderQR<CMat>(b).householderQ() * CMat::Identity(b.rows(), b.cols());
    Eigen::JacobiSVD<CMat> svd(qa.adjoint() * qb);
    double smin = std::min(1.0, svd.singularValues().minCoeff());
    // asin of the residual component is accurate for tiny angles
    double resid = (qb - qa * (qa.adjoint() * qb)).norm();
    return std::min(std::acos(smin), std::asin(std::min(1.0, resid)));
}

BasisChange xi_basis_change(const AlgebraDescriptor& alg) {
    require_phase_space(alg);
    const int n = alg.n_pairs, N = 2 * n;
    CMat T = xi_generator_matrix(n);
    CMat B = CMat::Zero(N, N);
    for (int i = 0; i < n; ++i) {
        B(i, i) = -rs2;  // xibar_i = (-cbar_q + i cbar_p)/sqrt2
        B(i, n + i) = I * rs2;
        B(n + i, i) = rs2;  // xibar*_i = (cbar_q + i cbar_p)/sqrt2
        B(n + i, n + i) = I * rs2;
    }
    CMat map = CMat::Zero(2 * N, 2 * N);
    map.topLeftCorner(N, N) = T;
    map.bottomRightCorner(N, N) = B;
    return {alg, map, exterior_lift(alg, T.inverse().transpose())};
}

CVec from_xi(const AlgebraDescriptor& alg, const CVec& xi_coeffs) {
    require_phase_space(alg);
    return exterior_lift(alg, xi_generator_matrix(alg.n_pairs).transpose()) * xi_coeffs;
}

CVec to_xi(const AlgebraDescriptor& alg, const CVec& c_coeffs) { return *xi_basis_change(alg).fiber * c_coeffs; }

XiHamiltonian xi_hamiltonian(const AlgebraDescriptor& alg, const RMat& hessian) {
    require_phase_space(alg);
    const int n = alg.n_pairs;
    if (hessian.rows() != 2 * n || hessian.cols() != 2 * n) throw Error("Hessian dimension mismatch");
    auto ops = xi_basis_change(alg).operators();
    auto X = [&](int k) { return ops[k]; };
    auto Xs = [&](int k) { return ops[n + k]; };
    auto Xb = [&](int k) { return ops[2 * n + k]; };
    auto Xbs = [&](int k) { return ops[3 * n + k]; };
    // d_z = (d_q - i d_p)/sqrt2, d_zbar = (d_q + i d_p)/sqrt2
    CMat Z = CMat::Zero(n, 2 * n);
    for (int k = 0; k < n; ++k) {
        Z(k, k) = rs2;
        Z(k, n + k) = -I * rs2;
    }
    CMat Zb = Z.conjugate();
    CMat H = hessian.cast<cplx>();
    CMat hzz = Z * H * Z.transpose(), hbb = Zb * H * Zb.transpose(), hzb = Z * H * Zb.transpose();
    const int D = alg.fiber_dim();
    XiHamiltonian out{CMat::Zero(D, D), CMat::Zero(D, D), CMat::Zero(D, D)};
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a) {
            out.mixed += (X(k) * Xb(a) + Xs(a) * Xbs(k)) * hzb(k, a);
            out.antiholo += Xs(a) * Xb(k) * hbb(a, k);
            out.holo += X(a) * Xbs(k) * hzz(a, k);
        }
    return out;
}

SymplecticPhysicalResidual symplectic_physical_check(const AlgebraDescriptor& alg, const CVec& candidate_xi,
                                                     const RMat& hessian) {
    if (candidate_xi.size() != alg.fiber_dim()) throw Error("candidate has wrong dimension");
    CVec psi = from_xi(alg, candidate_xi);
    XiHamiltonian h = xi_hamiltonian(alg, hessian);
    return {((h.holo + h.antiholo) * psi).norm(), (h.mixed * psi).norm(),
            (ferm_matrix(alg, hessian).matrix * psi).norm()};
}

std::vector<CVec> symplectic_physical_family(const AlgebraDescriptor& alg) {
    require_phase_space(alg);
    const int n = alg.n_pairs;
    // in xi coordinates xi_i sits at bit q_i and xi*_i at bit p_i
    Multivector x(alg);
    for (int i = 0; i < n; ++i) x += Multivector::generator(alg, i) * Multivector::generator(alg, n + i);
    Multivector x2 = x * x;
    std::vector<CVec> out;
    Multivector power = Multivector::scalar(alg, 1.0);
    for (int k = 0; 2 * k <= n; ++k) {
        out.push_back(power.to_vector());
        power = power * x2;
    }
    return out;
}

BasisChange psi_basis_change(const AlgebraDescriptor& alg) {
    require_phase_space(alg);
    const int N = alg.n_state;
    CMat w = alg.omega.cast<cplx>(), wl = omega_lower(alg).cast<cplx>();
    CMat map = CMat::Zero(2 * N, 2 * N);
    // psi^a = (c^a + i w^{ab} cbar_b)/sqrt2
    map.topLeftCorner(N, N) = CMat::Identity(N, N) * rs2;
    map.topRightCorner(N, N) = I * w * rs2;
    // psibar_a = (cbar_a + i w_{ab} c^b)/sqrt2
    map.bottomLeftCorner(N, N) = I * wl * rs2;
    map.bottomRightCorner(N, N) = CMat::Identity(N, N) * rs2;
    return {alg, map, std::nullopt};
}

BasisChange psi_inverse(const AlgebraDescriptor& alg) {
    require_phase_space(alg);
    const int N = alg.n_state;
    CMat w = alg.omega.cast<cplx>(), wl = omega_lower(alg).cast<cplx>();
    // c^a = (psi^a - i w^{ab} psibar_b)/sqrt2, cbar_a = (psibar_a - i w_{ab} psi^b)/sqrt2,
    // written as combinations of psi^0.., psibar_0..
    CMat inv = CMat::Zero(2 * N, 2 * N);
    inv.topLeftCorner(N, N) = CMat::Identity(N, N) * rs2;
    inv.topRightCorner(N, N) = -I * w * rs2;
    inv.bottomLeftCorner(N, N) = -I * wl * rs2;
    inv.bottomRightCorner(N, N) = CMat::Identity(N, N) * rs2;
    // re-express on the original operators
    return {alg, inv * psi_basis_change(alg).op_map, std::nullopt};
}

ClosureReport closure_check(const AlgebraDescriptor& alg, const Metric& metric, const std::vector<RMat>& hessians,
                            const std::vector<CVec>& subspace) {
    if (!(metric.algebra == alg)) throw Error("metric does not match the algebra");
    ClosureReport r;
    for (const auto& h : hessians) {
        CMat A = ferm_matrix(alg, h).matrix;
        CMat Ad = adjoint(metric, A);
        CMat diff = A - Ad, comm = A * Ad - Ad * A;
        for (const auto& v : subspace) {
            if (v.size() != alg.fiber_dim()) throw Error("subspace vector has wrong dimension");
            r.hermiticity = std::max(r.hermiticity, (diff * v).norm());
            r.commutator = std::max(r.commutator, (comm * v).norm());
        }
    }
    return r;
}

}  // namespace kvn
