#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kvn/scalar_products.hpp"

namespace kvn {

struct NogoRow {
    std::string family;
    std::map<std::string, double> params;  // g03 enters as g03_re, g03_im
    bool consistent = false;
    std::string reason;   // why the rule was rejected
    double residual = 0;  // max hermiticity residual of H_ferm over the sampled Hessians
    Signature signature;
    bool dichotomy_ok = true;
};

struct NogoScan {
    std::vector<NogoRow> rows;
    bool all_ok = true;
};

// Metrics for the three generalized conjugation families on the n = 1 fiber, solved from
// their rules, plus an SvH reference row evaluated on quartic-model Hessians.
NogoScan nogo_scan(int samples, std::uint64_t seed);

}  // namespace kvn
