#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "kvn/common.hpp"

namespace kvn {

// Phase point (q_1..q_n, p_1..p_n).
using PhasePoint = RVec;

struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

class HamiltonianModel {
public:
    using ScalarFn = std::function<double(const PhasePoint&)>;
    using VectorFn = std::function<RVec(const PhasePoint&)>;
    using MatrixFn = std::function<RMat(const PhasePoint&)>;

    HamiltonianModel(int n_pairs, ScalarFn h, VectorFn grad, MatrixFn hess, std::string provenance);

    int n_pairs() const { return n_; }
    const std::string& provenance() const { return provenance_; }
    double evaluate(const PhasePoint& x) const;
    RVec gradient(const PhasePoint& x) const;
    // symmetrized; throws if the raw Hessian is asymmetric beyond 1e-8 relative
    RMat hessian(const PhasePoint& x) const;

private:
    int n_;
    ScalarFn h_;
    VectorFn grad_;
    MatrixFn hess_;
    std::string provenance_;
};

// Sum over pairs of p^2/(2m) + m w^2 q^2/2.
HamiltonianModel harmonic_model(int n, double m, double w);
// p^2/2 - q^2/2 per pair.
HamiltonianModel inverted_model(int n);
HamiltonianModel free_model(int n);
// p^2/2 + lambda4 q^4/4 per pair.
HamiltonianModel quartic_model(int n, double lambda4);
// Expression over q1..qn, p1..pn (q, p when n = 1); derivatives by hyper-dual AD.
HamiltonianModel parse_hamiltonian(const std::string& text, int n = 1);
// "harmonic", "inverted", "free", "quartic" or expression text
HamiltonianModel make_model(const std::string& text, int n, double m = 1, double w = 1, double lambda4 = 1);

// Hamilton's equations: phi_dot = omega grad H.
RVec hamilton_vector_field(const HamiltonianModel& model, const PhasePoint& x);
// Jacobi generator M^a_d = omega^{ab} d_b d_d H.
RMat jacobi_generator(const HamiltonianModel& model, const PhasePoint& x);
RMat symplectic_form(int n);

struct Trajectory {
    std::vector<double> t;
    std::vector<PhasePoint> phi;
    std::vector<double> energy;
    double energy_drift = 0;  // max |H(t)-H(0)| / |H(0)| (absolute when H(0) = 0)
};

// Number of RK4 steps and their size covering [0, t] with steps no larger than dt.
struct StepPlan {
    long steps;
    double h;
};
StepPlan plan_steps(double t, double dt);

Trajectory flow(const HamiltonianModel& model, const PhasePoint& phi0, double t, double dt);

struct JacobiState {
    PhasePoint phi;
    RMat monodromy;
    double t = 0;
};
JacobiState monodromy(const HamiltonianModel& model, const PhasePoint& phi0, double t, double dt);

double lyapunov(const HamiltonianModel& model, const PhasePoint& phi0, double T, double dt,
                double renorm_interval = 1.0);

struct LyapunovEnsemble {
    std::vector<PhasePoint> starts;
    std::vector<double> estimates;
    double mean = 0;
};
// Initial points uniform in [-box, box]^{2n}, drawn from a seeded generator.
LyapunovEnsemble lyapunov_monte_carlo(const HamiltonianModel& model, int samples, std::uint64_t seed, double box,
                                      double T, double dt, double renorm_interval = 1.0);

// Columns: t, q.., p.., energy
void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int n);

}  // namespace kvn
