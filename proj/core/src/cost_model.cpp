#include "vaq/cost_model.hpp"

namespace vaq::plan {

void CostModel::validate() const {
  const double vals[] = {cost_seq_tuple,        cost_index_probe_base,
                         cost_distance_per_dim, cost_hash_build_tuple,
                         cost_hash_probe_tuple, cost_nl_inner_lookup};
  for (double v : vals)
    if (!(v > 0.0)) throw DataError("cost model constants must be > 0");
}

CostModel cost_profile(const std::string &name) {
  if (name == "default") return CostModel{};
  if (name == "scan-heavy") {
    // Penalizes sequential access; useful for sensitivity runs.
    CostModel m;
    m.cost_seq_tuple = 0.05;
    return m;
  }
  throw UsageError("unknown cost profile '" + name +
                   "' (valid: default, scan-heavy)");
}

std::vector<std::string> cost_profile_names() {
  return {"default", "scan-heavy"};
}

}  // namespace vaq::plan
