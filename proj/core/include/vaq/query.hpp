#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vaq/catalog.hpp"
#include "vaq/storage.hpp"

namespace vaq::plan {

// Columns are referenced by qualified name "relation.column" once rows flow
// through joins; these helpers keep the convention in one place.
inline std::string qualified(const std::string &relation,
                             const std::string &column) {
  return relation + "." + column;
}

// Synthetic distance column emitted by a scan that evaluates a vector
// range predicate; usable in ORDER BY and projections.
inline std::string distance_column(const std::string &relation,
                                   const std::string &column) {
  return relation + "." + column + ":dist";
}

enum class CmpOp { Eq, Lt, Le, Gt, Ge };

const char *cmp_op_name(CmpOp op);

using Literal = std::variant<std::int64_t, double, std::string>;

// Single-table predicate `relation.column <op> value`.
struct ScalarFilter {
  std::string relation;
  std::string column;
  CmpOp op = CmpOp::Eq;
  Literal value;
};

// The `column <-> query < D` condition under Euclidean distance; the
// threshold comparison is strict.
struct VectorRangePredicate {
  std::string relation;
  std::string column;
  storage::VectorValue query_vector;
  double threshold = 0.0;

  std::string dist_name() const { return distance_column(relation, column); }
};

struct JoinEdge {
  std::string left_relation;
  std::string left_column;
  std::string right_relation;
  std::string right_column;
};

// Arithmetic over scalar columns for aggregate inputs (e.g. price*(1-disc)).
struct Expr {
  enum class Op { Column, Const, Add, Sub, Mul };

  Op op = Op::Const;
  std::string relation, column;  // Op::Column
  double value = 0.0;            // Op::Const
  std::shared_ptr<const Expr> lhs, rhs;

  static std::shared_ptr<const Expr> col(std::string rel, std::string name) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Column;
    e->relation = std::move(rel);
    e->column = std::move(name);
    return e;
  }
  static std::shared_ptr<const Expr> constant(double v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Const;
    e->value = v;
    return e;
  }
  static std::shared_ptr<const Expr> binary(Op op,
                                            std::shared_ptr<const Expr> l,
                                            std::shared_ptr<const Expr> r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
};

using ExprPtr = std::shared_ptr<const Expr>;

enum class AggFunc { Sum, Count, Min, Max, Avg };

const char *agg_func_name(AggFunc f);

struct AggregateItem {
  AggFunc func = AggFunc::Count;
  ExprPtr input;  // null for Count
  std::string output_name;
};

struct AggregateSpec {
  std::vector<std::string> group_by;  // qualified column names
  std::vector<AggregateItem> items;
};

struct SortKey {
  std::string column;  // qualified or aggregate output name
  bool ascending = true;
};

struct ScanSpec {
  std::string relation;
  std::vector<ScalarFilter> filters;
  std::optional<VectorRangePredicate> vector_predicate;
};

// Normalized single-block logical plan: scans joined by an equi-join graph,
// then optional aggregate / sort / limit, projecting output_columns.
struct LogicalPlan {
  std::vector<ScanSpec> scans;
  std::vector<JoinEdge> joins;
  std::optional<AggregateSpec> aggregate;
  std::vector<SortKey> sort_keys;
  std::optional<std::size_t> limit;
  std::vector<std::string> output_columns;
};

// Checks relations/columns exist, vector predicates are well formed
// (matching dim, D > 0) and the join graph is connected.
void validate_logical(const LogicalPlan &plan, const Catalog &catalog);

}  // namespace vaq::plan
