#pragma once

#include <optional>
#include <vector>

#include "kvn/lie_derivative.hpp"

namespace kvn {

// Matrix of the algebra homomorphism e_a -> sum_k A(k, a) e_k on the full fiber.
CMat exterior_lift(const AlgebraDescriptor& alg, const CMat& A);

// New odd operators as combinations of c^0..c^{2n-1}, cbar_0..cbar_{2n-1}:
// new op k = sum_j op_map(k, j) op_j.
struct BasisChange {
    AlgebraDescriptor algebra;
    CMat op_map;
    // coefficient map old -> new variables, present when generators only mix among c
    std::optional<CMat> fiber;

    std::vector<CMat> operators() const;
};

// Orthonormal basis (columns) of the common null space of ferm_matrix over the Hessians.
CMat ferm_kernel(const AlgebraDescriptor& alg, const std::vector<RMat>& hessians, double tol = 1e-10);

// 1, Omega, Omega^2/2!, ..., Omega^n/n! with Omega = sum_i c^{q_i} c^{p_i}
std::vector<CVec> svh_physical_basis(const AlgebraDescriptor& alg);

// Largest principal angle between two column spans (radians); pi/2 when dimensions differ.
double max_principal_angle(const CMat& a, const CMat& b);

// Order: xi_1..xi_n, xi*_1..xi*_n, xibar_1..xibar_n, xibar*_1..xibar*_n.
BasisChange xi_basis_change(const AlgebraDescriptor& alg);
// c-representation vector of a state given by its xi-monomial coefficients
CVec from_xi(const AlgebraDescriptor& alg, const CVec& xi_coeffs);
CVec to_xi(const AlgebraDescriptor& alg, const CVec& c_coeffs);

// The three groups of terms of H_ferm written in xi variables.
struct XiHamiltonian {
    CMat mixed;     // (xi_k xibar_a + xi*_a xibar*_k) d_k dbar_a H
    CMat antiholo;  // xi*_a xibar_k dbar_a dbar_k H
    CMat holo;      // xi_a xibar*_k d_a d_k H
};
XiHamiltonian xi_hamiltonian(const AlgebraDescriptor& alg, const RMat& hessian);

struct SymplecticPhysicalResidual {
    double last_two = 0;  // holo + antiholo applied to the candidate
    double mixed = 0;     // mixed terms applied to the candidate
    double full = 0;      // H_ferm applied to the candidate
};
// candidate given by xi-monomial coefficients
SymplecticPhysicalResidual symplectic_physical_check(const AlgebraDescriptor& alg, const CVec& candidate_xi,
                                                     const RMat& hessian);
// xi-coefficients of 1, X^2, X^4, ... with X = sum_i xi_i xi*_i (even numbers of xi, positive norm)
std::vector<CVec> symplectic_physical_family(const AlgebraDescriptor& alg);

// Order: psi^0..psi^{2n-1}, psibar_0..psibar_{2n-1}.
BasisChange psi_basis_change(const AlgebraDescriptor& alg);
// the inverse map expressing c^a, cbar_a through psi, psibar
BasisChange psi_inverse(const AlgebraDescriptor& alg);

struct ClosureReport {
    double hermiticity = 0;  // max |(H - H^dag) psi|
    double commutator = 0;   // max |[H, H^dag] psi|
};
ClosureReport closure_check(const AlgebraDescriptor& alg, const Metric& metric, const std::vector<RMat>& hessians,
                            const std::vector<CVec>& subspace);

}  // namespace kvn
