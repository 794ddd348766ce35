#pragma once

#include "kvn/dynamics.hpp"
#include "kvn/scalar_products.hpp"

namespace kvn {

// phi' = S phi; generators c' = S c, conjugate momenta cbar' = S^{-T} cbar.
struct LinearCanonical {
    RMat S;

    // validates S omega S^T = omega to 1e-12
    static LinearCanonical from_matrix(const RMat& S);
    int n_pairs() const { return int(S.rows()) / 2; }
    RMat cbar_matrix() const;
    // coefficient map psi -> psi' on the fiber
    CMat fiber_lift() const;
    // Hessian in the new coordinates, S^{-T} Hess S^{-1}
    RMat transform_hessian(const RMat& hess) const;
};

// q' = alpha q, p' = p / alpha for one pair
LinearCanonical scaling_transform(double alpha);

// g' = F^{-H} g F^{-1}
Metric pushforward_metric(const Metric& metric, const LinearCanonical& T);

struct InvarianceResult {
    double before = 0;
    double after = 0;
    double condition = 1;  // condition number of the fiber lift
    // after lies in [lower, upper]: before scaled by the extreme squared singular values of F^{-1}
    double lower = 0;
    double upper = 0;
    bool within_bounds(double rel = 1e-8) const;
};
InvarianceResult hermiticity_invariance(const HamiltonianModel& model, const Metric& metric, const LinearCanonical& T,
                                        const PhasePoint& phi);

}  // namespace kvn
