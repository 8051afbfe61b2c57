#include "vaq/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace vaq::plan {

namespace {

bool is_dist_column(const std::string &name) {
  return name.size() > 5 && name.compare(name.size() - 5, 5, ":dist") == 0;
}

std::pair<std::string, std::string> split_qualified(const std::string &name) {
  const auto dot = name.find('.');
  if (dot == std::string::npos)
    throw DataError("expected qualified column name, got '" + name + "'");
  return {name.substr(0, dot), name.substr(dot + 1)};
}

void collect_expr_columns(const ExprPtr &expr,
                          std::map<std::string, std::set<std::string>> &out) {
  if (!expr) return;
  if (expr->op == Expr::Op::Column) out[expr->relation].insert(expr->column);
  collect_expr_columns(expr->lhs, out);
  collect_expr_columns(expr->rhs, out);
}

double ndv_of(const Catalog &catalog, const std::string &relation,
              const std::string &column) {
  const auto &col = catalog.relation(relation).column(column);
  if (col.stats() && col.stats()->ndv > 0)
    return static_cast<double>(col.stats()->ndv);
  return std::max<double>(1.0, static_cast<double>(
                                   catalog.relation(relation).row_count()));
}

double literal_as_double(const Literal &v) {
  if (std::holds_alternative<std::int64_t>(v))
    return static_cast<double>(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  throw DataError("string literal used in a range comparison");
}

}  // namespace

double scalar_filter_selectivity(const Catalog &catalog,
                                 const ScalarFilter &filter) {
  const auto &col = catalog.relation(filter.relation).column(filter.column);
  const auto &stats = col.stats();
  if (filter.op == CmpOp::Eq) {
    const double ndv = ndv_of(catalog, filter.relation, filter.column);
    return std::clamp(1.0 / ndv, 0.0, 1.0);
  }
  if (!stats || !stats->has_range) return 1.0 / 3.0;  // no range info
  const double lo = stats->min_value, hi = stats->max_value;
  if (hi <= lo) return 1.0;
  const double v = literal_as_double(filter.value);
  double sel = 1.0;
  switch (filter.op) {
    case CmpOp::Lt:
    case CmpOp::Le: sel = (v - lo) / (hi - lo); break;
    case CmpOp::Gt:
    case CmpOp::Ge: sel = (hi - v) / (hi - lo); break;
    case CmpOp::Eq: break;
  }
  return std::clamp(sel, 0.0, 1.0);
}

JoinGraph join_graph_of(const LogicalPlan &logical) {
  JoinGraph g;
  for (const auto &s : logical.scans) g.relations.push_back(s.relation);
  for (const auto &e : logical.joins)
    g.edges.emplace_back(e.left_relation, e.right_relation);
  return g;
}

void validate_logical(const LogicalPlan &logical, const Catalog &catalog) {
  if (logical.scans.empty()) throw DataError("logical plan has no scans");

  std::set<std::string> scan_rels;
  for (const auto &scan : logical.scans) {
    if (!scan_rels.insert(scan.relation).second)
      throw DataError("relation '" + scan.relation + "' scanned twice");
    if (!catalog.has_relation(scan.relation))
      throw DataError("unknown relation '" + scan.relation + "'");
    const auto &rel = catalog.relation(scan.relation);
    for (const auto &f : scan.filters) {
      if (f.relation != scan.relation)
        throw DataError("filter on '" + f.relation + "' attached to scan of '" +
                        scan.relation + "'");
      const auto &col = rel.column(f.column);  // throws if missing
      if (col.type().kind == storage::ColumnKind::Vector)
        throw DataError("scalar filter on vector column '" + f.column + "'");
    }
    if (scan.vector_predicate) {
      const auto &p = *scan.vector_predicate;
      if (p.relation != scan.relation)
        throw DataError("vector predicate on '" + p.relation +
                        "' attached to scan of '" + scan.relation + "'");
      const auto &col = rel.column(p.column);
      if (col.type().kind != storage::ColumnKind::Vector)
        throw DataError("vector predicate on non-vector column '" + p.column +
                        "'");
      if (p.query_vector.dim() != col.type().dim)
        throw DataError("query vector dim " +
                        std::to_string(p.query_vector.dim()) +
                        " != column dim " + std::to_string(col.type().dim));
      if (!(p.threshold > 0.0))
        throw DataError("vector range threshold must be > 0");
    }
  }

  for (const auto &e : logical.joins) {
    if (!scan_rels.count(e.left_relation) || !scan_rels.count(e.right_relation))
      throw DataError("join edge references non-scanned relation");
    const auto &lc = catalog.relation(e.left_relation).column(e.left_column);
    const auto &rc = catalog.relation(e.right_relation).column(e.right_column);
    if (lc.type().kind != storage::ColumnKind::Int64 ||
        rc.type().kind != storage::ColumnKind::Int64)
      throw DataError("equi-join keys must be int64 columns (" +
                      e.left_column + " = " + e.right_column + ")");
  }

  // Connectivity.
  if (logical.scans.size() > 1) {
    std::set<std::string> reached{logical.scans.front().relation};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto &e : logical.joins) {
        const bool l = reached.count(e.left_relation) > 0;
        const bool r = reached.count(e.right_relation) > 0;
        if (l != r) {
          reached.insert(l ? e.right_relation : e.left_relation);
          grew = true;
        }
      }
    }
    if (reached.size() != scan_rels.size())
      throw DataError("join graph is disconnected");
  }
}

namespace {

double join_output_estimate(
    double rows_left, double rows_right,
    const std::vector<std::pair<double, double>> &edge_ndvs) {
  double est = rows_left * rows_right;
  for (const auto &[ndv_l, ndv_r] : edge_ndvs) {
    const double d = std::max(
        1.0, std::max(std::min(ndv_l, rows_left), std::min(ndv_r, rows_right)));
    est /= d;
  }
  return std::max(est, 0.0);
}

}  // namespace

EnumerationResult enumerate_join_orders(const JoinGraph &graph,
                                        const RelationEstimates &estimates) {
  EnumerationResult result;
  const std::size_t n = graph.relations.size();
  if (n == 0) return result;

  std::vector<std::string> rels = graph.relations;
  std::sort(rels.begin(), rels.end());

  auto adjacent = [&](const std::set<std::string> &placed,
                      const std::string &r) {
    for (const auto &[a, b] : graph.edges) {
      if (a == r && placed.count(b)) return true;
      if (b == r && placed.count(a)) return true;
    }
    return false;
  };

  // Connectivity check up front.
  {
    std::set<std::string> reached{rels.front()};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto &[a, b] : graph.edges) {
        const bool l = reached.count(a) > 0, r = reached.count(b) > 0;
        if (l != r) {
          reached.insert(l ? b : a);
          grew = true;
        }
      }
    }
    if (reached.size() != n) throw DataError("join graph is disconnected");
  }

  auto rows_of = [&](const std::string &r) {
    auto it = estimates.rows.find(r);
    return it == estimates.rows.end() ? 1.0 : it->second;
  };

  if (n <= 8) {
    std::vector<std::string> order;
    std::set<std::string> placed;
    std::function<void()> recurse = [&]() {
      if (order.size() == n) {
        result.orders.push_back(order);
        return;
      }
      for (const auto &r : rels) {
        if (placed.count(r)) continue;
        if (!placed.empty() && !adjacent(placed, r)) continue;
        placed.insert(r);
        order.push_back(r);
        recurse();
        order.pop_back();
        placed.erase(r);
      }
    };
    recurse();
    result.exhaustive = true;
    return result;
  }

  // Greedy: grow from the smallest relation, always appending the adjacent
  // relation producing the smallest estimated join output.
  result.exhaustive = false;
  std::string start = rels.front();
  for (const auto &r : rels)
    if (rows_of(r) < rows_of(start)) start = r;

  std::vector<std::string> order{start};
  std::set<std::string> placed{start};
  double cur_rows = rows_of(start);
  while (order.size() < n) {
    std::string best;
    double best_out = 0.0;
    for (const auto &r : rels) {
      if (placed.count(r) || !adjacent(placed, r)) continue;
      std::vector<std::pair<double, double>> edge_ndvs;
      for (const auto &e : graph.edges) {
        std::string other;
        if (e.first == r && placed.count(e.second)) other = e.second;
        else if (e.second == r && placed.count(e.first)) other = e.first;
        else continue;
        edge_ndvs.emplace_back(cur_rows, rows_of(r));  // ndv fallback: rows
      }
      const double out = join_output_estimate(cur_rows, rows_of(r), edge_ndvs);
      if (best.empty() || out < best_out) {
        best = r;
        best_out = out;
      }
    }
    if (best.empty()) throw InternalError("greedy enumeration stuck");
    placed.insert(best);
    order.push_back(best);
    cur_rows = best_out;
  }
  result.orders.push_back(order);
  return result;
}

// ---------------------------------------------------------------------------
// Planner
// ---------------------------------------------------------------------------

struct Planner::Leaf {
  std::string relation;
  ScanSpec spec;
  PhysOp scan_op = PhysOp::SeqScan;
  bool has_vector = false;
  bool inlj_allowed = false;
  double base_rows = 0.0;
  double scan_out_rows = 0.0;  // out of the scan node itself
  double out_rows = 0.0;       // after scalar filters
  double scalar_sel = 1.0;
  double chain_cost = 0.0;
  double scan_cost = 0.0;
  std::vector<std::string> scan_columns;
  card::CardinalityEstimate vec_estimate;
};

Planner::Planner(const Catalog &catalog, const CostModel &cost_model,
                 card::VectorCardinalityEstimator &estimator,
                 std::string estimator_name, std::string cost_profile_name)
    : catalog_(catalog),
      cost_(cost_model),
      estimator_(estimator),
      estimator_name_(std::move(estimator_name)),
      cost_profile_name_(std::move(cost_profile_name)) {
  cost_.validate();
}

PhysicalPlan Planner::plan(const LogicalPlan &logical) {
  auto plans = plan_impl(logical, 1);
  return std::move(plans.front());
}

std::vector<PhysicalPlan> Planner::plan_candidates(const LogicalPlan &logical,
                                                   std::size_t max_candidates) {
  return plan_impl(logical, std::max<std::size_t>(max_candidates, 1));
}

std::vector<PhysicalPlan> Planner::plan_impl(const LogicalPlan &logical,
                                             std::size_t max_candidates) {
  const auto t_start = std::chrono::steady_clock::now();
  validate_logical(logical, catalog_);

  // Columns each relation must emit: outputs, join keys, sort keys,
  // aggregate inputs and filter columns evaluated above the scan.
  std::map<std::string, std::set<std::string>> needed;
  auto note_qualified = [&](const std::string &name) {
    if (is_dist_column(name)) return;
    const auto [rel, col] = split_qualified(name);
    needed[rel].insert(col);
  };
  for (const auto &name : logical.output_columns) {
    if (is_dist_column(name)) continue;
    const auto dot = name.find('.');
    if (dot == std::string::npos) continue;  // aggregate output
    note_qualified(name);
  }
  for (const auto &e : logical.joins) {
    needed[e.left_relation].insert(e.left_column);
    needed[e.right_relation].insert(e.right_column);
  }
  for (const auto &k : logical.sort_keys) {
    if (is_dist_column(k.column)) continue;
    if (k.column.find('.') != std::string::npos) note_qualified(k.column);
  }
  if (logical.aggregate) {
    for (const auto &g : logical.aggregate->group_by) note_qualified(g);
    for (const auto &item : logical.aggregate->items)
      collect_expr_columns(item.input, needed);
  }
  for (const auto &scan : logical.scans) {
    if (scan.vector_predicate) {
      // Scalar filters move into a Filter node above this scan, so their
      // columns must flow through the batch.
      for (const auto &f : scan.filters) needed[scan.relation].insert(f.column);
    }
  }

  // Estimate every vector predicate once; the framework caches probes.
  double estimation_ms = 0.0;
  std::map<std::string, card::CardinalityEstimate> vec_estimates;
  std::vector<PredicateEstimate> predicate_estimates;
  for (const auto &scan : logical.scans) {
    if (!scan.vector_predicate) continue;
    auto est = estimator_.estimate(catalog_, *scan.vector_predicate);
    estimation_ms += est.planning_cost_ms;
    vec_estimates[scan.relation] = est;
    predicate_estimates.push_back({*scan.vector_predicate, est});
  }

  // Build per-relation scan alternatives and keep the cheaper chain.
  std::map<std::string, Leaf> leaves;
  for (const auto &scan : logical.scans) {
    const auto &rel = catalog_.relation(scan.relation);
    Leaf leaf;
    leaf.relation = scan.relation;
    leaf.spec = scan;
    leaf.base_rows = static_cast<double>(rel.row_count());
    leaf.has_vector = scan.vector_predicate.has_value();
    leaf.inlj_allowed = !leaf.has_vector;
    for (const auto &c : needed[scan.relation]) leaf.scan_columns.push_back(c);

    double sel = 1.0;
    for (const auto &f : scan.filters)
      sel *= scalar_filter_selectivity(catalog_, f);
    leaf.scalar_sel = sel;

    if (!leaf.has_vector) {
      leaf.scan_op = PhysOp::SeqScan;
      leaf.scan_out_rows = leaf.base_rows * sel;
      leaf.out_rows = leaf.scan_out_rows;
      leaf.scan_cost = leaf.base_rows * cost_.cost_seq_tuple;
      leaf.chain_cost = leaf.scan_cost;
    } else {
      const auto &pred = *scan.vector_predicate;
      const double dim =
          static_cast<double>(rel.column(pred.column).type().dim);
      const double vec_rows =
          static_cast<double>(vec_estimates[scan.relation].value);

      const double seq_cost =
          leaf.base_rows * cost_.cost_seq_tuple +
          leaf.base_rows * dim * cost_.cost_distance_per_dim;

      const auto *index = catalog_.find_index(pred.relation, pred.column);
      double vis_cost = std::numeric_limits<double>::infinity();
      if (index != nullptr) {
        const double visited =
            static_cast<double>(index->params().ef_search) + vec_rows;
        vis_cost = cost_.cost_index_probe_base +
                   visited * dim * cost_.cost_distance_per_dim;
      }

      if (vis_cost < seq_cost) {
        leaf.scan_op = PhysOp::VectorIndexScan;
        leaf.scan_cost = vis_cost;
      } else {
        leaf.scan_op = PhysOp::SeqScan;
        leaf.scan_cost = seq_cost;
      }
      leaf.scan_out_rows = vec_rows;
      leaf.out_rows = vec_rows * sel;
      leaf.chain_cost = leaf.scan_cost;
      if (!scan.filters.empty())
        leaf.chain_cost += leaf.scan_out_rows * cost_.cost_seq_tuple;
    }
    leaves.emplace(scan.relation, std::move(leaf));
  }

  // Candidate join orders.
  RelationEstimates rel_estimates;
  for (const auto &[name, leaf] : leaves) rel_estimates.rows[name] = leaf.out_rows;
  const auto enumeration =
      enumerate_join_orders(join_graph_of(logical), rel_estimates);

  auto effective_ndv = [&](const std::string &rel, const std::string &col,
                           double rows) {
    return std::min(ndv_of(catalog_, rel, col), std::max(rows, 1.0));
  };

  auto make_leaf_nodes = [&](const Leaf &leaf)
      -> std::pair<std::unique_ptr<PhysicalNode>, double> {
    auto scan = std::make_unique<PhysicalNode>();
    scan->op = leaf.scan_op;
    scan->relation = leaf.relation;
    scan->scan_columns = leaf.scan_columns;
    scan->est_rows = leaf.scan_out_rows;
    scan->self_cost = leaf.scan_cost;
    scan->subtree_cost = leaf.scan_cost;
    if (leaf.has_vector) {
      scan->vector_predicate = leaf.spec.vector_predicate;
      const auto &est = vec_estimates.at(leaf.relation);
      if (leaf.scan_op == PhysOp::VectorIndexScan && est.cache) {
        scan->ecqo_cache = est.cache;
        scan->annotations.push_back("ann-probe-reused");
      }
    } else {
      scan->filters = leaf.spec.filters;
      scan->est_rows = leaf.out_rows;
    }
    if (leaf.has_vector && !leaf.spec.filters.empty()) {
      auto filter = std::make_unique<PhysicalNode>();
      filter->op = PhysOp::Filter;
      filter->filters = leaf.spec.filters;
      filter->est_rows = leaf.out_rows;
      filter->self_cost = leaf.scan_out_rows * cost_.cost_seq_tuple;
      filter->subtree_cost = scan->subtree_cost + filter->self_cost;
      filter->children.push_back(std::move(scan));
      return {std::move(filter), leaf.out_rows};
    }
    return {std::move(scan), leaf.out_rows};
  };

  struct Candidate {
    double cost = 0.0;
    std::vector<std::string> order;
    PhysicalPlan plan;
  };
  std::vector<Candidate> candidates;

  for (const auto &order : enumeration.orders) {
    // Fold the order left-deep, picking the cheaper join method per step.
    const Leaf &first = leaves.at(order.front());
    auto [tree, tree_rows] = make_leaf_nodes(first);
    double tree_cost = tree->subtree_cost;
    std::set<std::string> placed{order.front()};

    bool feasible = true;
    for (std::size_t step = 1; step < order.size() && feasible; ++step) {
      const Leaf &leaf = leaves.at(order[step]);

      // All edges connecting the placed set to the new relation.
      std::vector<JoinEdge> step_edges;
      for (const auto &e : logical.joins) {
        if (placed.count(e.left_relation) && e.right_relation == leaf.relation)
          step_edges.push_back(e);
        else if (placed.count(e.right_relation) &&
                 e.left_relation == leaf.relation)
          step_edges.push_back({e.right_relation, e.right_column,
                                e.left_relation, e.left_column});
      }
      if (step_edges.empty()) {
        feasible = false;  // cross product; enumeration should prevent this
        break;
      }

      std::vector<std::pair<double, double>> edge_ndvs;
      for (const auto &e : step_edges)
        edge_ndvs.emplace_back(
            effective_ndv(e.left_relation, e.left_column, tree_rows),
            effective_ndv(e.right_relation, e.right_column, leaf.out_rows));
      const double out_rows =
          join_output_estimate(tree_rows, leaf.out_rows, edge_ndvs);

      const double build_rows = std::min(tree_rows, leaf.out_rows);
      const double probe_rows = std::max(tree_rows, leaf.out_rows);
      const double hash_cost = leaf.chain_cost +
                               build_rows * cost_.cost_hash_build_tuple +
                               probe_rows * cost_.cost_hash_probe_tuple;

      const auto &inner_key_col =
          catalog_.relation(leaf.relation).column(step_edges.front().right_column);
      const bool inlj_ok = leaf.inlj_allowed &&
                           inner_key_col.type().kind ==
                               storage::ColumnKind::Int64;
      const double inlj_cost =
          inlj_ok ? tree_rows * cost_.cost_nl_inner_lookup +
                        out_rows * cost_.cost_seq_tuple
                  : std::numeric_limits<double>::infinity();

      auto join = std::make_unique<PhysicalNode>();
      join->left_key = qualified(step_edges.front().left_relation,
                                 step_edges.front().left_column);
      join->right_key = qualified(step_edges.front().right_relation,
                                  step_edges.front().right_column);
      for (std::size_t i = 1; i < step_edges.size(); ++i)
        join->extra_keys.emplace_back(
            qualified(step_edges[i].left_relation, step_edges[i].left_column),
            qualified(step_edges[i].right_relation, step_edges[i].right_column));
      join->est_rows = out_rows;

      if (inlj_cost < hash_cost) {
        join->op = PhysOp::IndexNestedLoopJoin;
        join->inner_relation = leaf.relation;
        join->inner_key_column = step_edges.front().right_column;
        join->inner_filters = leaf.spec.filters;
        join->inner_columns = leaf.scan_columns;
        join->self_cost = inlj_cost;
        join->subtree_cost = tree->subtree_cost + inlj_cost;
        join->children.push_back(std::move(tree));
        tree_cost += inlj_cost;
      } else {
        join->op = PhysOp::HashJoin;
        join->build_child = tree_rows <= leaf.out_rows ? 0 : 1;
        join->self_cost = hash_cost - leaf.chain_cost;
        auto [leaf_chain, leaf_rows] = make_leaf_nodes(leaf);
        (void)leaf_rows;
        join->subtree_cost =
            tree->subtree_cost + leaf_chain->subtree_cost + join->self_cost;
        join->children.push_back(std::move(tree));
        join->children.push_back(std::move(leaf_chain));
        tree_cost += hash_cost;
      }
      tree = std::move(join);
      tree_rows = out_rows;
      placed.insert(leaf.relation);
    }
    if (!feasible) continue;

    // Aggregate -> Sort -> Limit.
    if (logical.aggregate) {
      auto agg = std::make_unique<PhysicalNode>();
      agg->op = PhysOp::Aggregate;
      agg->aggregate = logical.aggregate;
      double groups = 1.0;
      for (const auto &g : logical.aggregate->group_by) {
        const auto [rel, col] = split_qualified(g);
        groups *= effective_ndv(rel, col, tree_rows);
      }
      agg->est_rows = std::min(tree_rows, groups);
      agg->self_cost = tree_rows * cost_.cost_hash_probe_tuple;
      agg->subtree_cost = tree->subtree_cost + agg->self_cost;
      agg->children.push_back(std::move(tree));
      tree = std::move(agg);
      tree_cost += tree->self_cost;
      tree_rows = tree->est_rows;
    }

    if (!logical.sort_keys.empty()) {
      // Distance sort over a bare VectorIndexScan chain is already ordered.
      bool elide = false;
      if (!logical.aggregate && order.size() == 1 &&
          logical.sort_keys.size() == 1 && logical.sort_keys[0].ascending &&
          is_dist_column(logical.sort_keys[0].column)) {
        const PhysicalNode *n = tree.get();
        while (n->op == PhysOp::Filter) n = n->child(0);
        if (n->op == PhysOp::VectorIndexScan && n->vector_predicate &&
            n->vector_predicate->dist_name() == logical.sort_keys[0].column)
          elide = true;
      }
      if (!elide) {
        auto sort = std::make_unique<PhysicalNode>();
        sort->op = PhysOp::Sort;
        sort->sort_keys = logical.sort_keys;
        // Tie-break on the projected columns: every plan then emits the
        // same sequence, which keeps Limit deterministic across plans.
        for (const auto &out : logical.output_columns) {
          bool present = false;
          for (const auto &k : sort->sort_keys)
            if (k.column == out) present = true;
          if (!present) sort->sort_keys.push_back({out, true});
        }
        sort->est_rows = tree_rows;
        sort->self_cost = tree_rows *
                          std::log2(std::max(tree_rows, 2.0)) *
                          cost_.cost_seq_tuple;
        sort->subtree_cost = tree->subtree_cost + sort->self_cost;
        sort->children.push_back(std::move(tree));
        tree = std::move(sort);
        tree_cost += tree->self_cost;
      }
    }

    if (logical.limit) {
      auto limit = std::make_unique<PhysicalNode>();
      limit->op = PhysOp::Limit;
      limit->limit = *logical.limit;
      limit->est_rows = std::min(tree_rows, static_cast<double>(*logical.limit));
      limit->self_cost = 0.0;
      limit->subtree_cost = tree->subtree_cost;
      limit->children.push_back(std::move(tree));
      tree = std::move(limit);
    }

    Candidate cand;
    cand.cost = tree->subtree_cost;
    cand.order = order;
    cand.plan.root = std::move(tree);
    cand.plan.output_columns = logical.output_columns;
    cand.plan.join_order = order;
    cand.plan.exhaustive_enumeration = enumeration.exhaustive;
    cand.plan.estimator_name = estimator_name_;
    cand.plan.cost_profile_name = cost_profile_name_;
    cand.plan.total_cost = cand.cost;
    cand.plan.vector_estimates = predicate_estimates;
    if (!enumeration.exhaustive)
      cand.plan.root->annotations.push_back("enumeration:greedy");
    candidates.push_back(std::move(cand));
  }

  if (candidates.empty())
    throw InternalError("no feasible join order (disconnected graph?)");

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate &a, const Candidate &b) {
                     if (a.cost != b.cost) return a.cost < b.cost;
                     return a.order < b.order;
                   });
  if (candidates.size() > max_candidates) candidates.resize(max_candidates);

  const auto t_end = std::chrono::steady_clock::now();
  const double planning_ms =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();

  std::vector<PhysicalPlan> plans;
  plans.reserve(candidates.size());
  for (auto &c : candidates) {
    c.plan.planning_ms = planning_ms;
    c.plan.estimation_ms = estimation_ms;
    plans.push_back(std::move(c.plan));
  }
  return plans;
}

}  // namespace vaq::plan
