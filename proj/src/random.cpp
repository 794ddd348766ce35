#include "kvn/random.hpp"

namespace kvn {

RMat random_symmetric(int dim, Rng& g) {
    RMat m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) m(i, j) = m(j, i) = 2 * uniform01(g) - 1;
    return m;
}

std::vector<RMat> random_hessians(int n, int count, std::uint64_t seed) {
    Rng g(seed);
    std::vector<RMat> out;
    for (int k = 0; k < count; ++k) out.push_back(random_symmetric(2 * n, g));
    return out;
}

}  // namespace kvn
