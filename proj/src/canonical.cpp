#include "kvn/canonical.hpp"

#include <cmath>

#include "kvn/lie_derivative.hpp"
#include "kvn/physical.hpp"

namespace kvn {

LinearCanonical LinearCanonical::from_matrix(const RMat& S) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || S.rows() == 0) throw Error("transform must be 2n x 2n");
    RMat w = symplectic_form(int(S.rows()) / 2);
    double err = (S * w * S.transpose() - w).cwiseAbs().maxCoeff();
    if (err > 1e-12 * std::max(1.0, S.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff()))
        throw Error("transform is not symplectic (violation " + std::to_string(err) + ")");
    return {S};
}

RMat LinearCanonical::cbar_matrix() const { return S.inverse().transpose(); }

CMat LinearCanonical::fiber_lift() const {
    return exterior_lift(AlgebraDescriptor::phase_space(n_pairs()), cbar_matrix().cast<cplx>());
}

RMat LinearCanonical::transform_hessian(const RMat& hess) const {
    RMat Si = S.inverse();
    return Si.transpose() * hess * Si;
}

LinearCanonical scaling_transform(double alpha) {
    if (alpha == 0 || !std::isfinite(alpha)) throw Error("alpha must be finite and nonzero");
    RMat S = RMat::Zero(2, 2);
    S(0, 0) = alpha;
    S(1, 1) = 1 / alpha;
    return LinearCanonical::from_matrix(S);
}

Metric pushforward_metric(const Metric& metric, const LinearCanonical& T) {
    if (!(metric.algebra == AlgebraDescriptor::phase_space(T.n_pairs()))) throw Error("metric/transform mismatch");
    CMat F = T.fiber_lift();
    Eigen::FullPivLU<CMat> lu(F);
    if (!lu.isInvertible()) throw Error("singular fiber lift");
    CMat Fi = lu.inverse();
    Metric out = metric;
    out.g = Fi.adjoint() * metric.g * Fi;
    out.g = 0.5 * (out.g + out.g.adjoint());
    out.family = MetricFamily::custom;
    return out;
}

InvarianceResult hermiticity_invariance(const HamiltonianModel& model, const Metric& metric, const LinearCanonical& T,
                                        const PhasePoint& phi) {
    if (model.n_pairs() != T.n_pairs()) throw Error("model/transform mismatch");
    const AlgebraDescriptor& alg = metric.algebra;
    RMat hess = model.hessian(phi);
    Metric g2 = pushforward_metric(metric, T);
    CMat A = ferm_matrix(alg, hess).matrix;
    CMat A2 = ferm_matrix(alg, T.transform_hessian(hess)).matrix;
    Eigen::JacobiSVD<CMat> svd(T.fiber_lift());
    const RVec& s = svd.singularValues();
    const double smax = s(0), smin = s(s.size() - 1);
    InvarianceResult r{hermiticity_residual(metric, A), hermiticity_residual(g2, A2), smax / smin};
    r.lower = r.before / (smax * smax);
    r.upper = r.before / (smin * smin);
    return r;
}

bool InvarianceResult::within_bounds(double rel) const {
    double slack = rel * condition * std::max(1.0, upper);
    return after >= lower - slack && after <= upper + slack;
}

}  // namespace kvn
