#include "vaq/physical_plan.hpp"

#include <sstream>

namespace vaq::plan {

const char *phys_op_name(PhysOp op) {
  switch (op) {
    case PhysOp::SeqScan: return "SeqScan";
    case PhysOp::VectorIndexScan: return "VectorIndexScan";
    case PhysOp::Filter: return "Filter";
    case PhysOp::HashJoin: return "HashJoin";
    case PhysOp::IndexNestedLoopJoin: return "IndexNestedLoopJoin";
    case PhysOp::Sort: return "Sort";
    case PhysOp::Aggregate: return "Aggregate";
    case PhysOp::Limit: return "Limit";
  }
  return "?";
}

const char *cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

const char *agg_func_name(AggFunc f) {
  switch (f) {
    case AggFunc::Sum: return "sum";
    case AggFunc::Count: return "count";
    case AggFunc::Min: return "min";
    case AggFunc::Max: return "max";
    case AggFunc::Avg: return "avg";
  }
  return "?";
}

namespace {

std::string literal_str(const Literal &v) {
  if (std::holds_alternative<std::int64_t>(v))
    return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) {
    std::ostringstream ss;
    ss.precision(15);
    ss << std::get<double>(v);
    return ss.str();
  }
  return "'" + std::get<std::string>(v) + "'";
}

std::string filter_str(const ScalarFilter &f) {
  return qualified(f.relation, f.column) + " " + cmp_op_name(f.op) + " " +
         literal_str(f.value);
}

std::string node_detail(const PhysicalNode &n) {
  std::string detail;
  switch (n.op) {
    case PhysOp::SeqScan:
    case PhysOp::VectorIndexScan:
      detail = n.relation;
      if (n.vector_predicate) {
        std::ostringstream ss;
        ss.precision(6);
        ss << " dist(" << n.vector_predicate->column << ") < "
           << n.vector_predicate->threshold;
        detail += ss.str();
      }
      for (const auto &f : n.filters) detail += " [" + filter_str(f) + "]";
      break;
    case PhysOp::Filter:
      for (const auto &f : n.filters) detail += "[" + filter_str(f) + "] ";
      break;
    case PhysOp::HashJoin:
      detail = n.left_key + " = " + n.right_key +
               (n.build_child == 0 ? " build=left" : " build=right");
      break;
    case PhysOp::IndexNestedLoopJoin:
      detail = n.left_key + " = " + n.right_key + " inner=" + n.inner_relation;
      break;
    case PhysOp::Sort:
      for (const auto &k : n.sort_keys)
        detail += k.column + (k.ascending ? " asc " : " desc ");
      break;
    case PhysOp::Aggregate: {
      if (n.aggregate) {
        detail = "by(";
        for (const auto &g : n.aggregate->group_by) detail += g + " ";
        detail += ")";
      }
      break;
    }
    case PhysOp::Limit:
      detail = std::to_string(n.limit);
      break;
  }
  return detail;
}

void hash_node(const PhysicalNode &n, Fnv1a &h) {
  h.update(phys_op_name(n.op));
  h.update(n.relation);
  h.update(n.left_key);
  h.update(n.right_key);
  h.update(n.inner_relation);
  h.update(n.inner_key_column);
  h.update_pod(n.build_child);
  for (const auto &f : n.filters) h.update(filter_str(f));
  for (const auto &f : n.inner_filters) h.update(filter_str(f));
  if (n.vector_predicate) {
    h.update(n.vector_predicate->relation);
    h.update(n.vector_predicate->column);
  }
  for (const auto &k : n.sort_keys) {
    h.update(k.column);
    h.update_pod(k.ascending);
  }
  if (n.aggregate) {
    for (const auto &g : n.aggregate->group_by) h.update(g);
    for (const auto &item : n.aggregate->items) {
      h.update(agg_func_name(item.func));
      h.update(item.output_name);
    }
  }
  if (n.op == PhysOp::Limit) h.update_pod(n.limit);
  h.update_pod(static_cast<std::uint32_t>(n.children.size()));
  for (const auto &c : n.children) hash_node(*c, h);
}

nlohmann::json node_json(const PhysicalNode &n) {
  nlohmann::json j;
  j["op"] = phys_op_name(n.op);
  const std::string detail = node_detail(n);
  if (!detail.empty()) j["detail"] = detail;
  if (!n.relation.empty()) j["relation"] = n.relation;
  j["est_rows"] = n.est_rows;
  j["est_cost"] = n.subtree_cost;
  j["self_cost"] = n.self_cost;
  if (n.observed_rows >= 0) {
    j["obs_rows"] = n.observed_rows;
    j["elapsed_ms"] = n.elapsed_ms;
  }
  if (!n.annotations.empty()) j["annotations"] = n.annotations;
  j["children"] = nlohmann::json::array();
  for (const auto &c : n.children) j["children"].push_back(node_json(*c));
  return j;
}

void node_text(const PhysicalNode &n, int depth, std::ostringstream &out) {
  for (int i = 0; i < depth; ++i) out << "  ";
  out << "-> " << phys_op_name(n.op);
  const std::string detail = node_detail(n);
  if (!detail.empty()) out << " (" << detail << ")";
  out << "  est_rows=" << static_cast<long long>(n.est_rows)
      << " cost=" << n.subtree_cost;
  if (n.observed_rows >= 0)
    out << " obs_rows=" << n.observed_rows << " time_ms=" << n.elapsed_ms;
  for (const auto &a : n.annotations) out << " [" << a << "]";
  out << "\n";
  for (const auto &c : n.children) node_text(*c, depth + 1, out);
}

void reset_node(PhysicalNode &n) {
  n.observed_rows = -1;
  n.elapsed_ms = 0.0;
  n.elapsed_total_ms = 0.0;
  for (auto &c : n.children) reset_node(*c);
}

PhysicalNode *find_vec(PhysicalNode *n, const std::string &relation,
                       const std::string &column) {
  if (n->vector_predicate && n->vector_predicate->relation == relation &&
      n->vector_predicate->column == column)
    return n;
  for (auto &c : n->children)
    if (auto *found = find_vec(c.get(), relation, column)) return found;
  return nullptr;
}

}  // namespace

std::uint64_t PhysicalPlan::plan_hash() const {
  Fnv1a h;
  hash_node(*root, h);
  for (const auto &c : output_columns) h.update(c);
  return h.digest();
}

nlohmann::json PhysicalPlan::explain_json() const {
  nlohmann::json j;
  j["plan"] = node_json(*root);
  j["output_columns"] = output_columns;
  j["join_order"] = join_order;
  j["enumeration"] = exhaustive_enumeration ? "exhaustive" : "greedy";
  j["estimator"] = estimator_name;
  j["cost_profile"] = cost_profile_name;
  j["total_cost"] = total_cost;
  j["plan_hash"] = hex64(plan_hash());
  return j;
}

std::string PhysicalPlan::explain_text() const {
  std::ostringstream out;
  out << "plan (estimator=" << estimator_name
      << ", enumeration=" << (exhaustive_enumeration ? "exhaustive" : "greedy")
      << ", cost=" << total_cost << ", hash=" << hex64(plan_hash()) << ")\n";
  node_text(*root, 0, out);
  return out.str();
}

void PhysicalPlan::reset_observed() { reset_node(*root); }

PhysicalNode *PhysicalPlan::find_vector_node(const std::string &relation,
                                             const std::string &column) {
  return find_vec(root.get(), relation, column);
}

}  // namespace vaq::plan
