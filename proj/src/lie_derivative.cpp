#include "kvn/lie_derivative.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace kvn {

GrassmannOperator ferm_matrix(const AlgebraDescriptor& alg, const RMat& hessian) {
    const int N = alg.n_state;
    if (alg.n_pairs * 2 != N) throw Error("ferm_matrix needs a phase-space algebra");
    if (hessian.rows() != N || hessian.cols() != N) throw Error("Hessian dimension mismatch");
    if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, hessian.cwiseAbs().maxCoeff()))
        throw Error("Hessian is not symmetric");
    RMat M = alg.omega.cast<double>() * hessian;
    const int D = alg.fiber_dim();
    CMat h = CMat::Zero(D, D);
    for (int a = 0; a < N; ++a) {
        CMat ca = contraction_op(alg, a).matrix;
        for (int d = 0; d < N; ++d)
            if (M(a, d) != 0) h += (I * M(a, d)) * (ca * wedge_op(alg, d).matrix);
    }
    return {alg, h, Parity::even};
}

FiberTrajectory evolve_fiber(const HamiltonianModel& model, const Metric& metric, const PhasePoint& phi0,
                             const CVec& fiber0, double t, double dt) {
    const int n = model.n_pairs();
    AlgebraDescriptor alg = AlgebraDescriptor::phase_space(n);
    if (!(metric.algebra == alg)) throw Error("metric does not match the model's fiber");
    if (fiber0.size() != alg.fiber_dim()) throw Error("fiber has wrong dimension");
    if (phi0.size() != 2 * n) throw Error("phase point has wrong dimension");
    StepPlan plan = plan_steps(t, dt);

    FiberTrajectory out;
    PhasePoint phi = phi0;
    CVec psi = fiber0;
    RMat J = RMat::Identity(2 * n, 2 * n);
    auto gen = [&](const PhasePoint& x) -> CMat { return -I * ferm_matrix(alg, model.hessian(x)).matrix; };
    auto field = [&](const PhasePoint& x) { return hamilton_vector_field(model, x); };
    auto jac = [&](const PhasePoint& x) { return jacobi_generator(model, x); };
    double e0 = model.evaluate(phi);
    auto record = [&](double time) {
        out.trajectory.t.push_back(time);
        out.trajectory.phi.push_back(phi);
        double e = model.evaluate(phi);
        out.trajectory.energy.push_back(e);
        out.trajectory.energy_drift =
            std::max(out.trajectory.energy_drift, std::abs(e - e0) / (e0 != 0 ? std::abs(e0) : 1.0));
        out.fiber.push_back(psi);
        out.norm.push_back(inner(metric, psi, psi).real());
    };
    record(0);
    const double h = plan.h;
    for (long k = 0; k < plan.steps; ++k) {
        RVec k1 = field(phi);
        PhasePoint p2 = phi + 0.5 * h * k1;
        RVec k2 = field(p2);
        PhasePoint p3 = phi + 0.5 * h * k2;
        RVec k3 = field(p3);
        PhasePoint p4 = phi + h * k3;
        RVec k4 = field(p4);

        CVec f1 = gen(phi) * psi;
        CVec f2 = gen(p2) * (psi + 0.5 * h * f1);
        CVec f3 = gen(p3) * (psi + 0.5 * h * f2);
        CVec f4 = gen(p4) * (psi + h * f3);

        RMat j1 = jac(phi) * J;
        RMat j2 = jac(p2) * (J + 0.5 * h * j1);
        RMat j3 = jac(p3) * (J + 0.5 * h * j2);
        RMat j4 = jac(p4) * (J + h * j3);

        phi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        psi += h / 6 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
        J += h / 6 * (j1 + 2 * j2 + 2 * j3 + j4);
        if (!phi.allFinite() || !psi.allFinite() || !J.allFinite()) throw Error("non-finite values");
        record(double(k + 1) * h);
    }
    out.jacobi = {phi, J, plan.steps ? t : 0.0};
    return out;
}

double norm_functional(const Metric& metric, const std::vector<WeightedState>& ensemble) {
    double s = 0;
    for (const auto& w : ensemble) {
        if (w.weight < 0) throw Error("quadrature weights must be non-negative");
        if (w.state.size() != metric.g.rows()) throw Error("metric/algebra mismatch");
        s += w.weight * inner(metric, w.state, w.state).real();
    }
    return s;
}

CMat cbar_transform(const AlgebraDescriptor& alg) {
    const int n = alg.n_pairs;
    if (n < 1 || n > 3 || alg.n_state != 2 * n) throw Error("cbar representation needs 1 <= n <= 3");
    // cbar_a realized as odd parameters of an enlarged algebra
    AlgebraDescriptor big = AlgebraDescriptor::phase_space(n, 2 * n);
    Multivector x(big);
    for (int a = 0; a < 2 * n; ++a) x += Multivector::generator(big, a) * Multivector::param(big, a);
    Multivector kernel = exp_nilpotent(x);
    // measure dcbar_{q1} dcbar_{p1} dcbar_{q2} dcbar_{p2} ...
    std::vector<int> bits;
    for (int i = 0; i < n; ++i) {
        bits.push_back(big.param_bit(alg.q(i)));
        bits.push_back(big.param_bit(alg.p(i)));
    }
    const int D = alg.fiber_dim();
    CMat from_bar = CMat::Zero(D, D);
    for (int S = 0; S < D; ++S) {
        Mask pm = 0;
        for (int a = 0; a < 2 * n; ++a)
            if (S & (1 << a)) pm |= Mask{1} << big.param_bit(a);
        Multivector psi = berezin_integrate(kernel * Multivector::monomial(big, pm), bits);
        for (auto& [m, z] : psi.terms()) from_bar(m, S) = z;
    }
    return from_bar.inverse();
}

CVec to_cbar_representation(const AlgebraDescriptor& alg, const CVec& psi) {
    if (psi.size() != alg.fiber_dim()) throw Error("state has wrong dimension");
    return cbar_transform(alg) * psi;
}

CVec from_cbar_representation(const AlgebraDescriptor& alg, const CVec& psi_bar) {
    if (psi_bar.size() != alg.fiber_dim()) throw Error("state has wrong dimension");
    return cbar_transform(alg).inverse() * psi_bar;
}

namespace {

CMat ring_block(double omega_freq, int N) {
    const double h = 2 * std::numbers::pi / N;
    CMat L = CMat::Zero(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            if (j == k) continue;
            double x = (j - k) * h / 2;
            double sgn = ((j - k) % 2 == 0) ? 1.0 : -1.0;
            double d = N % 2 == 0 ? 0.5 * sgn / std::tan(x) : 0.5 * sgn / std::sin(x);
            L(j, k) = -I * omega_freq * d;
        }
    return L;
}

}  // namespace

RingLiouvillian ring_liouvillian(double omega_freq, const std::vector<double>& rings, int n_theta) {
    if (n_theta < 4) throw Error("n_theta must be at least 4");
    if (rings.empty()) throw Error("need at least one ring");
    const int R = int(rings.size());
    RingLiouvillian out{omega_freq, rings, n_theta, CMat::Zero(R * n_theta, R * n_theta)};
    CMat block = ring_block(omega_freq, n_theta);
    for (int r = 0; r < R; ++r) out.op.block(r * n_theta, r * n_theta, n_theta, n_theta) = block;
    return out;
}

RVec ring_liouvillian_spectrum(double omega_freq, int n_theta) {
    if (n_theta < 4) throw Error("n_theta must be at least 4");
    Eigen::SelfAdjointEigenSolver<CMat> es(ring_block(omega_freq, n_theta), Eigen::EigenvaluesOnly);
    RVec ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
}

double propagator_equivalence_check(const HamiltonianModel& model, const PhasePoint& phi0, const CVec& fiber0,
                                    double t, double dt) {
    AlgebraDescriptor alg = AlgebraDescriptor::phase_space(model.n_pairs());
    FiberTrajectory ft = evolve_fiber(model, svh_metric(alg), phi0, fiber0, t, dt);
    StepPlan plan = plan_steps(t, dt);
    CVec psi = fiber0;
    // generator frozen at the midpoint of each step
    for (long k = 0; k < plan.steps; ++k) {
        PhasePoint mid = 0.5 * (ft.trajectory.phi[k] + ft.trajectory.phi[k + 1]);
        CMat step = (-I * plan.h * ferm_matrix(alg, model.hessian(mid)).matrix).exp();
        psi = step * psi;
    }
    return (psi - ft.fiber.back()).cwiseAbs().maxCoeff();
}

}  // namespace kvn
