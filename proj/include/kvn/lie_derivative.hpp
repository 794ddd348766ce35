#pragma once

#include <vector>

#include "kvn/dynamics.hpp"
#include "kvn/scalar_products.hpp"

namespace kvn {

// i cbar_a M^a_d c^d with M = omega * hessian.
GrassmannOperator ferm_matrix(const AlgebraDescriptor& alg, const RMat& hessian);

struct FiberTrajectory {
    Trajectory trajectory;
    std::vector<CVec> fiber;    // one per trajectory sample
    std::vector<double> norm;   // Re <psi|psi>_g per sample
    JacobiState jacobi;         // at the final time
};

// d psi/dt = -i H_ferm(phi(t)) psi along the classical trajectory, one combined RK4 field.
FiberTrajectory evolve_fiber(const HamiltonianModel& model, const Metric& metric, const PhasePoint& phi0,
                             const CVec& fiber0, double t, double dt);

struct WeightedState {
    double weight;
    CVec state;
};
double norm_functional(const Metric& metric, const std::vector<WeightedState>& ensemble);

// Coefficients in the cbar-monomial basis (bit a of the index marks cbar_a), n <= 3.
CVec to_cbar_representation(const AlgebraDescriptor& alg, const CVec& psi);
CVec from_cbar_representation(const AlgebraDescriptor& alg, const CVec& psi_bar);
// matrix of to_cbar_representation
CMat cbar_transform(const AlgebraDescriptor& alg);

struct RingLiouvillian {
    double omega_freq = 1;
    std::vector<double> rings;  // action values; the benchmark frequency does not depend on them
    int n_theta = 0;
    CMat op;                    // block diagonal, one circulant block per ring
};
// L = -i omega d/dtheta by periodic spectral differentiation on every ring.
RingLiouvillian ring_liouvillian(double omega_freq, const std::vector<double>& rings, int n_theta);
// sorted eigenvalues of a single ring block
RVec ring_liouvillian_spectrum(double omega_freq, int n_theta);

// Max coefficient deviation between evolve_fiber and time-ordered exp(-i h H_ferm) stepping.
double propagator_equivalence_check(const HamiltonianModel& model, const PhasePoint& phi0, const CVec& fiber0,
                                    double t, double dt);

}  // namespace kvn
