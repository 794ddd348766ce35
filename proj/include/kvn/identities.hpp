#pragma once

#include <string>
#include <vector>

#include "kvn/scalar_products.hpp"

namespace kvn {

// One slot of an eigenstate: "-" slots start from a set bit and are
// displaced by exp(-x cbar_a), "+" slots start empty and use exp(-x c^a).
struct Slot {
    bool minus = true;
    Multivector x;  // odd parameter element; empty means zero
};

Multivector eigen_ket(const AlgebraDescriptor& alg, const std::vector<Slot>& slots);

// int d(bits) [ ket (bra|.) ] applied to each basis vector, times prefactor.
// Integrals nest left to right; the measure sits left of the ket, so it
// anticommutes past odd basis monomials.
struct ResolutionResult {
    CMat matrix;
    double deviation = 0;  // max |matrix - 1|, including leftover parameter terms
};
ResolutionResult resolve_identity(const Metric& m, const Multivector& ket, const Multivector& bra_ket,
                                  const std::vector<int>& bits, cplx prefactor);

struct IdentityResult {
    std::string group;
    std::string name;
    double deviation = 0;
    bool pass = false;
};

struct IdentityReport {
    std::vector<IdentityResult> results;
    double max_deviation = 0;
    bool all_pass = true;
};

struct IdentityOptions {
    int n = 1;               // run fibers up to n pairs (n <= 2)
    double tol = 1e-12;
    std::vector<Metric> overrides;  // replace a builtin metric of the same family and size
};

IdentityReport run_identity_suite(const IdentityOptions& opt);

}  // namespace kvn
