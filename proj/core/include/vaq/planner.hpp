#pragma once

#include <map>
#include <string>
#include <vector>

#include "vaq/cardinality.hpp"
#include "vaq/cost_model.hpp"
#include "vaq/physical_plan.hpp"
#include "vaq/query.hpp"

namespace vaq::plan {

struct JoinGraph {
  std::vector<std::string> relations;
  std::vector<std::pair<std::string, std::string>> edges;
};

JoinGraph join_graph_of(const LogicalPlan &logical);

struct RelationEstimates {
  std::map<std::string, double> rows;
  std::map<std::pair<std::string, std::string>, double> ndv;
};

struct EnumerationResult {
  std::vector<std::vector<std::string>> orders;
  bool exhaustive = true;
};

// Left-deep, cross-product-free join orders. Exhaustive up to 8 relations;
// beyond that a single greedy order (smallest estimated output first) is
// returned and flagged non-exhaustive. Throws on a disconnected graph.
EnumerationResult enumerate_join_orders(const JoinGraph &graph,
                                        const RelationEstimates &estimates = {});

// Built-in scalar selectivity defaults: equality 1/NDV, ranges by min/max
// uniform interpolation.
double scalar_filter_selectivity(const Catalog &catalog,
                                 const ScalarFilter &filter);

class Planner {
 public:
  Planner(const Catalog &catalog, const CostModel &cost_model,
          card::VectorCardinalityEstimator &estimator,
          std::string estimator_name,
          std::string cost_profile_name = "default");

  // Cost-minimal plan among enumerated alternatives.
  PhysicalPlan plan(const LogicalPlan &logical);

  // Up to max_candidates cheapest plans, ascending by (cost, join order).
  std::vector<PhysicalPlan> plan_candidates(const LogicalPlan &logical,
                                            std::size_t max_candidates);

 private:
  struct Leaf;

  std::vector<PhysicalPlan> plan_impl(const LogicalPlan &logical,
                                      std::size_t max_candidates);

  const Catalog &catalog_;
  CostModel cost_;
  card::VectorCardinalityEstimator &estimator_;
  std::string estimator_name_;
  std::string cost_profile_name_;
};

}  // namespace vaq::plan
