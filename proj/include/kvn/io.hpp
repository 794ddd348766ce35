#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kvn/canonical.hpp"

namespace kvn {

using Json = nlohmann::ordered_json;

// {"family", "params", "n_pairs" | "single_mode", "dim", "g": row-major [re, im] pairs}
Json metric_to_json(const Metric& m);
// validates conjugate symmetry and invertibility
Metric metric_from_json(const Json& j);
Metric load_metric(const std::string& path);
void save_metric(const Metric& m, const std::string& path);

// [{"mask": S, "value": [re, im]}, ...] per vector, nonzero entries only
Json state_to_json(const CVec& v, double tol = 0.0);
CVec state_from_json(const Json& j, int dim);
Json subspace_to_json(const std::vector<CVec>& basis, double tol = 1e-14);

Json cplx_to_json(cplx z);
// {"S": [[row], ...]} with a 2n x 2n real matrix; validated as symplectic
LinearCanonical transform_from_json(const Json& j);
LinearCanonical load_transform(const std::string& path);

}  // namespace kvn
