#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kvn/common.hpp"

namespace kvn {

using Rng = std::mt19937_64;

// Uniform double in [0,1) from 53 raw bits: identical on every platform.
inline double uniform01(Rng& g) { return double(g() >> 11) * 0x1.0p-53; }

// Symmetric matrix with entries uniform in [-1, 1].
RMat random_symmetric(int dim, Rng& g);
// count random 2n x 2n Hessians from a seeded generator
std::vector<RMat> random_hessians(int n, int count, std::uint64_t seed);

}  // namespace kvn
