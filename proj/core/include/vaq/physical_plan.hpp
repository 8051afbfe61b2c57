#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vaq/cardinality.hpp"
#include "vaq/query.hpp"

namespace vaq::plan {

enum class PhysOp {
  SeqScan,
  VectorIndexScan,
  Filter,
  HashJoin,
  IndexNestedLoopJoin,
  Sort,
  Aggregate,
  Limit,
};

const char *phys_op_name(PhysOp op);

struct PhysicalNode {
  PhysOp op = PhysOp::SeqScan;

  // Scans. A SeqScan carrying a vector predicate evaluates only that
  // predicate (scalar filters live in a Filter above it) so its observed
  // row count is the predicate's true cardinality.
  std::string relation;
  std::vector<ScalarFilter> filters;
  std::optional<VectorRangePredicate> vector_predicate;
  std::shared_ptr<const vindex::RangeResult> ecqo_cache;
  std::vector<std::string> scan_columns;  // base columns this scan emits

  // Joins. HashJoin: children = {left, right}, build_child picks the build
  // side. IndexNestedLoopJoin: children = {outer}; the inner side is a
  // key-index lookup into a base relation described below.
  std::string left_key;   // qualified, resolved against children[0] schema
  std::string right_key;  // qualified, against children[1] / inner relation
  std::vector<std::pair<std::string, std::string>> extra_keys;
  int build_child = 1;
  std::string inner_relation;
  std::string inner_key_column;  // unqualified
  std::vector<ScalarFilter> inner_filters;
  std::vector<std::string> inner_columns;  // base columns the lookup emits

  std::vector<SortKey> sort_keys;
  std::optional<AggregateSpec> aggregate;
  std::size_t limit = 0;

  double est_rows = 0.0;
  double self_cost = 0.0;
  double subtree_cost = 0.0;

  // Filled by the executor.
  std::int64_t observed_rows = -1;
  double elapsed_ms = 0.0;       // exclusive of children
  double elapsed_total_ms = 0.0;  // inclusive

  std::vector<std::string> annotations;
  std::vector<std::unique_ptr<PhysicalNode>> children;

  PhysicalNode *child(std::size_t i) { return children[i].get(); }
  const PhysicalNode *child(std::size_t i) const { return children[i].get(); }
};

// Estimate attached to one vector predicate of the plan; the executor and
// the workload runner use these for feedback and reporting.
struct PredicateEstimate {
  VectorRangePredicate predicate;
  card::CardinalityEstimate estimate;
};

struct PhysicalPlan {
  std::unique_ptr<PhysicalNode> root;
  std::vector<std::string> output_columns;
  std::vector<std::string> join_order;
  bool exhaustive_enumeration = true;
  std::string estimator_name;
  std::string cost_profile_name = "default";
  double total_cost = 0.0;
  double planning_ms = 0.0;
  double estimation_ms = 0.0;  // portion spent probing/sampling
  std::vector<PredicateEstimate> vector_estimates;

  // Stable digest over operator structure (ops, relations, methods, keys);
  // cardinalities and timings are excluded so the hash detects plan-shape
  // changes across estimator configs.
  std::uint64_t plan_hash() const;

  nlohmann::json explain_json() const;
  std::string explain_text() const;

  void reset_observed();

  PhysicalNode *find_vector_node(const std::string &relation,
                                 const std::string &column);
};

}  // namespace vaq::plan
