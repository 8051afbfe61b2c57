#pragma once

#include <string>
#include <vector>

#include "vaq/common.hpp"

namespace vaq::plan {

// Abstract cost units per unit of work. Constants ship as named profiles so
// they stay visible and overridable rather than buried in the planner.
struct CostModel {
  double cost_seq_tuple = 0.02;         // emit/examine one tuple in a scan
  double cost_index_probe_base = 100.0;  // fixed HNSW descent overhead
  double cost_distance_per_dim = 0.01;  // one distance eval, per dimension
  double cost_hash_build_tuple = 1.5;
  double cost_hash_probe_tuple = 1.0;
  double cost_nl_inner_lookup = 1.2;    // one key-index lookup

  void validate() const;
};

CostModel cost_profile(const std::string &name);
std::vector<std::string> cost_profile_names();

}  // namespace vaq::plan
