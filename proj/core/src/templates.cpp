#include "vaq/templates.hpp"

#include <cmath>

#include "vaq/benchgen.hpp"
#include "vaq/hnsw.hpp"
#include "vaq/rng.hpp"

namespace vaq::bench {

using plan::AggFunc;
using plan::AggregateSpec;
using plan::CmpOp;
using plan::Expr;
using plan::JoinEdge;
using plan::ScalarFilter;
using plan::SortKey;

Target Target::parse(const std::string &s) {
  if (s.rfind("k:", 0) == 0) {
    const auto k = std::stoll(s.substr(2));
    if (k < 1) throw UsageError("target match count must be >= 1");
    return match_count(k);
  }
  if (s.rfind("frac:", 0) == 0) {
    const auto f = std::stod(s.substr(5));
    if (!(f > 0.0) || f > 1.0)
      throw UsageError("target fraction must be in (0, 1]");
    return fraction(f);
  }
  throw UsageError("cannot parse target '" + s + "' (use k:<n> or frac:<f>)");
}

std::string Target::str() const {
  if (kind == Kind::MatchCount)
    return "k:" + std::to_string(static_cast<std::int64_t>(value));
  return "frac:" + std::to_string(value);
}

namespace {

ScalarFilter f_eq(const std::string &rel, const std::string &col,
                  plan::Literal v) {
  return {rel, col, CmpOp::Eq, std::move(v)};
}

ScalarFilter f_range(const std::string &rel, const std::string &col, CmpOp op,
                     std::int64_t v) {
  return {rel, col, op, v};
}

plan::ExprPtr revenue_expr() {
  // l_extendedprice * (1 - l_discount)
  return Expr::binary(
      Expr::Op::Mul, Expr::col("lineitem", "l_extendedprice"),
      Expr::binary(Expr::Op::Sub, Expr::constant(1.0),
                   Expr::col("lineitem", "l_discount")));
}

std::vector<QueryTemplate> build_templates() {
  std::vector<QueryTemplate> ts;

  // q3: the canonical 3-way join with a vector range condition, ordered by
  // distance.
  {
    QueryTemplate t;
    t.name = "q3";
    t.relations = {"partsupp", "lineitem", "orders"};
    t.joins = {{"partsupp", "ps_partkey", "lineitem", "l_partkey"},
               {"lineitem", "l_orderkey", "orders", "o_orderkey"}};
    t.filters = {f_range("orders", "o_orderdate", CmpOp::Ge, 9600),
                 f_range("orders", "o_orderdate", CmpOp::Le, 10500)};
    t.vector_slots = {{"partsupp", "ps_image_embedding", true, 0.0}};
    t.output_columns = {"partsupp.ps_partkey", "lineitem.l_extendedprice",
                        "lineitem.l_discount",
                        plan::distance_column("partsupp", "ps_image_embedding")};
    t.sort_keys = {{plan::distance_column("partsupp", "ps_image_embedding"),
                    true}};
    ts.push_back(std::move(t));
  }

  // q5: 4-way join, revenue by nation.
  {
    QueryTemplate t;
    t.name = "q5";
    t.relations = {"supplier", "partsupp", "lineitem", "orders"};
    t.joins = {{"supplier", "s_suppkey", "partsupp", "ps_suppkey"},
               {"partsupp", "ps_partkey", "lineitem", "l_partkey"},
               {"lineitem", "l_orderkey", "orders", "o_orderkey"}};
    t.filters = {f_range("orders", "o_orderdate", CmpOp::Ge, 9600),
                 f_range("orders", "o_orderdate", CmpOp::Le, 10800)};
    t.vector_slots = {{"partsupp", "ps_image_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"supplier.s_nationkey"};
    agg.items = {{AggFunc::Sum, revenue_expr(), "revenue"}};
    t.aggregate = agg;
    t.sort_keys = {{"revenue", false}};
    t.output_columns = {"supplier.s_nationkey", "revenue"};
    ts.push_back(std::move(t));
  }

  // q8: multi-vector variant; embeddings on both part and partsupp.
  {
    QueryTemplate t;
    t.name = "q8";
    t.relations = {"part", "partsupp", "lineitem", "orders"};
    t.joins = {{"part", "p_partkey", "partsupp", "ps_partkey"},
               {"partsupp", "ps_partkey", "lineitem", "l_partkey"},
               {"lineitem", "l_orderkey", "orders", "o_orderkey"}};
    t.filters = {f_range("orders", "o_orderdate", CmpOp::Ge, 9300),
                 f_range("orders", "o_orderdate", CmpOp::Le, 11000)};
    t.vector_slots = {{"partsupp", "ps_image_embedding", true, 0.0},
                      {"part", "p_embedding", false, 0.05}};
    AggregateSpec agg;
    agg.group_by = {"orders.o_shippriority"};
    agg.items = {{AggFunc::Avg, Expr::col("lineitem", "l_discount"),
                  "avg_discount"}};
    t.aggregate = agg;
    t.sort_keys = {{"orders.o_shippriority", true}};
    t.output_columns = {"orders.o_shippriority", "avg_discount"};
    ts.push_back(std::move(t));
  }

  // q9: supplier cost rollup over text embeddings.
  {
    QueryTemplate t;
    t.name = "q9";
    t.relations = {"part", "supplier", "partsupp", "lineitem"};
    t.joins = {{"part", "p_partkey", "partsupp", "ps_partkey"},
               {"supplier", "s_suppkey", "partsupp", "ps_suppkey"},
               {"partsupp", "ps_partkey", "lineitem", "l_partkey"},
               {"partsupp", "ps_suppkey", "lineitem", "l_suppkey"}};
    t.vector_slots = {{"partsupp", "ps_text_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"supplier.s_nationkey"};
    agg.items = {{AggFunc::Sum,
                  Expr::binary(Expr::Op::Mul,
                               Expr::col("partsupp", "ps_supplycost"),
                               Expr::col("lineitem", "l_quantity")),
                  "cost_sum"}};
    t.aggregate = agg;
    t.sort_keys = {{"cost_sum", false}};
    t.output_columns = {"supplier.s_nationkey", "cost_sum"};
    ts.push_back(std::move(t));
  }

  // q10: correlated tag + vector search, top revenue suppliers.
  {
    QueryTemplate t;
    t.name = "q10";
    t.relations = {"orders", "lineitem", "partsupp"};
    t.joins = {{"orders", "o_orderkey", "lineitem", "l_orderkey"},
               {"lineitem", "l_partkey", "partsupp", "ps_partkey"}};
    t.filters = {f_range("orders", "o_orderdate", CmpOp::Ge, 9600),
                 f_range("orders", "o_orderdate", CmpOp::Le, 11200),
                 f_eq("partsupp", "ps_tag", std::string("tag_3"))};
    t.vector_slots = {{"partsupp", "ps_image_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"partsupp.ps_suppkey"};
    agg.items = {{AggFunc::Sum, revenue_expr(), "revenue"}};
    t.aggregate = agg;
    t.sort_keys = {{"revenue", false}};
    t.limit = 20;
    t.output_columns = {"partsupp.ps_suppkey", "revenue"};
    ts.push_back(std::move(t));
  }

  // q11: two-way join, inventory value by part.
  {
    QueryTemplate t;
    t.name = "q11";
    t.relations = {"partsupp", "supplier"};
    t.joins = {{"partsupp", "ps_suppkey", "supplier", "s_suppkey"}};
    t.filters = {f_eq("supplier", "s_nationkey", std::int64_t{3})};
    t.vector_slots = {{"partsupp", "ps_image_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"partsupp.ps_partkey"};
    agg.items = {{AggFunc::Sum,
                  Expr::binary(Expr::Op::Mul,
                               Expr::col("partsupp", "ps_supplycost"),
                               Expr::col("partsupp", "ps_availqty")),
                  "value"}};
    t.aggregate = agg;
    t.sort_keys = {{"value", false}};
    t.limit = 50;
    t.output_columns = {"partsupp.ps_partkey", "value"};
    ts.push_back(std::move(t));
  }

  // q12: shipping priority counts over text embeddings.
  {
    QueryTemplate t;
    t.name = "q12";
    t.relations = {"orders", "lineitem", "partsupp"};
    t.joins = {{"orders", "o_orderkey", "lineitem", "l_orderkey"},
               {"lineitem", "l_partkey", "partsupp", "ps_partkey"},
               {"lineitem", "l_suppkey", "partsupp", "ps_suppkey"}};
    t.filters = {f_range("lineitem", "l_shipdate", CmpOp::Ge, 9800),
                 f_range("lineitem", "l_shipdate", CmpOp::Le, 10900)};
    t.vector_slots = {{"partsupp", "ps_text_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"orders.o_shippriority"};
    agg.items = {{AggFunc::Count, nullptr, "order_count"}};
    t.aggregate = agg;
    t.sort_keys = {{"orders.o_shippriority", true}};
    t.output_columns = {"orders.o_shippriority", "order_count"};
    ts.push_back(std::move(t));
  }

  // q20: dominated by the lineitem scan; quantity rollup per supplier.
  {
    QueryTemplate t;
    t.name = "q20";
    t.relations = {"part", "partsupp", "lineitem"};
    t.joins = {{"part", "p_partkey", "partsupp", "ps_partkey"},
               {"partsupp", "ps_partkey", "lineitem", "l_partkey"},
               {"partsupp", "ps_suppkey", "lineitem", "l_suppkey"}};
    t.filters = {f_eq("part", "p_brand", std::string("brand_2")),
                 f_range("lineitem", "l_shipdate", CmpOp::Ge, 9400),
                 f_range("lineitem", "l_shipdate", CmpOp::Le, 11600)};
    t.vector_slots = {{"partsupp", "ps_image_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"partsupp.ps_suppkey"};
    agg.items = {{AggFunc::Sum, Expr::col("lineitem", "l_quantity"),
                  "qty_sum"}};
    t.aggregate = agg;
    t.sort_keys = {{"qty_sum", false}};
    t.output_columns = {"partsupp.ps_suppkey", "qty_sum"};
    ts.push_back(std::move(t));
  }

  // ds7: star join over the fact table with the embedding on the part
  // dimension.
  {
    QueryTemplate t;
    t.name = "ds7";
    t.relations = {"lineitem", "part", "orders"};
    t.joins = {{"lineitem", "l_partkey", "part", "p_partkey"},
               {"lineitem", "l_orderkey", "orders", "o_orderkey"}};
    t.filters = {f_range("orders", "o_orderdate", CmpOp::Ge, 9500),
                 f_range("orders", "o_orderdate", CmpOp::Le, 10700)};
    t.vector_slots = {{"part", "p_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"part.p_brand"};
    agg.items = {{AggFunc::Avg, Expr::col("lineitem", "l_quantity"),
                  "avg_qty"}};
    t.aggregate = agg;
    t.sort_keys = {{"part.p_brand", true}};
    t.output_columns = {"part.p_brand", "avg_qty"};
    ts.push_back(std::move(t));
  }

  // ds98: single-fact revenue by brand.
  {
    QueryTemplate t;
    t.name = "ds98";
    t.relations = {"lineitem", "part"};
    t.joins = {{"lineitem", "l_partkey", "part", "p_partkey"}};
    t.filters = {f_range("lineitem", "l_shipdate", CmpOp::Ge, 9700),
                 f_range("lineitem", "l_shipdate", CmpOp::Le, 10600)};
    t.vector_slots = {{"part", "p_embedding", true, 0.0}};
    AggregateSpec agg;
    agg.group_by = {"part.p_brand"};
    agg.items = {{AggFunc::Sum, revenue_expr(), "revenue"}};
    t.aggregate = agg;
    t.sort_keys = {{"revenue", false}};
    t.output_columns = {"part.p_brand", "revenue"};
    ts.push_back(std::move(t));
  }

  return ts;
}

}  // namespace

const std::vector<QueryTemplate> &all_templates() {
  static const std::vector<QueryTemplate> templates = build_templates();
  return templates;
}

const QueryTemplate &template_by_name(const std::string &name) {
  for (const auto &t : all_templates())
    if (t.name == name) return t;
  std::string valid;
  for (const auto &t : all_templates()) valid += t.name + " ";
  throw UsageError("unknown template '" + name + "' (valid: " + valid + ")");
}

std::vector<std::string> template_names() {
  std::vector<std::string> names;
  for (const auto &t : all_templates()) names.push_back(t.name);
  return names;
}

InstantiatedQuery instantiate(
    const QueryTemplate &tmpl, const Catalog &catalog, std::uint64_t seed,
    const Target &target,
    const std::map<std::string, double> *frozen_thresholds) {
  InstantiatedQuery out;
  out.logical.joins = tmpl.joins;
  out.logical.aggregate = tmpl.aggregate;
  out.logical.sort_keys = tmpl.sort_keys;
  out.logical.limit = tmpl.limit;
  out.logical.output_columns = tmpl.output_columns;

  std::map<std::string, plan::VectorRangePredicate> preds;
  for (const auto &slot : tmpl.vector_slots) {
    Rng rng(mix_seed(seed, fnv1a(slot.relation + "." + slot.column)));
    const auto &rel = catalog.relation(slot.relation);
    auto query = perturbed_query(rel, slot.column, rng);

    double threshold = 0.0;
    bool calibration_ok = true;
    const std::string key = plan::qualified(slot.relation, slot.column);
    if (frozen_thresholds && frozen_thresholds->count(key)) {
      threshold = frozen_thresholds->at(key);
    } else {
      std::int64_t want = 0;
      if (slot.primary) {
        want = target.kind == Target::Kind::MatchCount
                   ? static_cast<std::int64_t>(target.value)
                   : fraction_target(catalog, slot.relation, target.value);
      } else {
        want = fraction_target(catalog, slot.relation, slot.secondary_fraction);
      }
      want = std::min<std::int64_t>(want,
                                    static_cast<std::int64_t>(rel.row_count()));
      const auto cal = calibrate_threshold(catalog, slot.relation, slot.column,
                                           query, want);
      threshold = cal.threshold;
      calibration_ok = cal.within_tolerance;
    }

    const auto oracle = vindex::brute_force_range(rel, slot.column,
                                                  query.components, threshold);
    PredicateMeta meta;
    meta.relation = slot.relation;
    meta.column = slot.column;
    meta.threshold = threshold;
    meta.oracle_count = static_cast<std::int64_t>(oracle.row_ids.size());
    meta.calibration_ok = calibration_ok;
    if (slot.primary)
      out.predicates.insert(out.predicates.begin(), meta);
    else
      out.predicates.push_back(meta);

    plan::VectorRangePredicate pred;
    pred.relation = slot.relation;
    pred.column = slot.column;
    pred.query_vector = std::move(query);
    pred.threshold = threshold;
    preds.emplace(slot.relation, std::move(pred));
  }

  for (const auto &rel_name : tmpl.relations) {
    plan::ScanSpec scan;
    scan.relation = rel_name;
    for (const auto &f : tmpl.filters)
      if (f.relation == rel_name) scan.filters.push_back(f);
    if (auto it = preds.find(rel_name); it != preds.end())
      scan.vector_predicate = std::move(it->second);
    out.logical.scans.push_back(std::move(scan));
  }
  return out;
}

}  // namespace vaq::bench
