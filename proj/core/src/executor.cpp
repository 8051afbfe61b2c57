#include "vaq/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <unordered_map>

#include "vaq/hnsw.hpp"

namespace vaq::exec {

using plan::PhysicalNode;
using plan::PhysOp;
using storage::ColumnKind;

std::size_t Schema::index_of(const std::string &name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw InternalError("column '" + name + "' not found in operator schema");
}

bool Schema::has(const std::string &name) const {
  for (const auto &n : names)
    if (n == name) return true;
  return false;
}

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ValueKind value_kind(const storage::Column &col) {
  switch (col.type().kind) {
    case ColumnKind::Int64:
    case ColumnKind::Date: return ValueKind::Int64;
    case ColumnKind::Float64: return ValueKind::Float64;
    case ColumnKind::String: return ValueKind::String;
    case ColumnKind::Vector:
      throw InternalError("vector column cannot flow through operators");
  }
  return ValueKind::Int64;
}

std::int64_t base_int(const storage::Column &col, std::size_t row) {
  return col.type().kind == ColumnKind::Date
             ? static_cast<std::int64_t>(col.date_at(row))
             : col.int_at(row);
}

void append_base_value(ColumnVec &out, const storage::Column &col,
                       std::size_t row) {
  switch (out.kind) {
    case ValueKind::Int64: out.i64.push_back(base_int(col, row)); break;
    case ValueKind::Float64: out.f64.push_back(col.float_at(row)); break;
    case ValueKind::String: out.str.push_back(col.string_at(row)); break;
  }
}

void append_from(ColumnVec &out, const ColumnVec &src, std::size_t row) {
  switch (out.kind) {
    case ValueKind::Int64: out.i64.push_back(src.i64[row]); break;
    case ValueKind::Float64: out.f64.push_back(src.f64[row]); break;
    case ValueKind::String: out.str.push_back(src.str[row]); break;
  }
}

bool compare_numeric(double a, plan::CmpOp op, double b) {
  switch (op) {
    case plan::CmpOp::Eq: return a == b;
    case plan::CmpOp::Lt: return a < b;
    case plan::CmpOp::Le: return a <= b;
    case plan::CmpOp::Gt: return a > b;
    case plan::CmpOp::Ge: return a >= b;
  }
  return false;
}

bool compare_string(const std::string &a, plan::CmpOp op,
                    const std::string &b) {
  switch (op) {
    case plan::CmpOp::Eq: return a == b;
    case plan::CmpOp::Lt: return a < b;
    case plan::CmpOp::Le: return a <= b;
    case plan::CmpOp::Gt: return a > b;
    case plan::CmpOp::Ge: return a >= b;
  }
  return false;
}

// Filter against a base relation row.
bool eval_filter_base(const plan::ScalarFilter &f, const storage::Column &col,
                      std::size_t row) {
  switch (col.type().kind) {
    case ColumnKind::Int64:
    case ColumnKind::Date: {
      const auto v = static_cast<double>(base_int(col, row));
      if (std::holds_alternative<std::string>(f.value))
        throw DataError("string literal compared against numeric column '" +
                        f.column + "'");
      const double lit = std::holds_alternative<double>(f.value)
                             ? std::get<double>(f.value)
                             : static_cast<double>(std::get<std::int64_t>(f.value));
      return compare_numeric(v, f.op, lit);
    }
    case ColumnKind::Float64: {
      if (std::holds_alternative<std::string>(f.value))
        throw DataError("string literal compared against numeric column '" +
                        f.column + "'");
      const double lit = std::holds_alternative<double>(f.value)
                             ? std::get<double>(f.value)
                             : static_cast<double>(std::get<std::int64_t>(f.value));
      return compare_numeric(col.float_at(row), f.op, lit);
    }
    case ColumnKind::String: {
      if (!std::holds_alternative<std::string>(f.value))
        throw DataError("non-string literal compared against string column '" +
                        f.column + "'");
      return compare_string(col.string_at(row), f.op,
                            std::get<std::string>(f.value));
    }
    case ColumnKind::Vector:
      throw DataError("scalar filter on vector column");
  }
  return false;
}

// Filter against an in-flight batch column.
bool eval_filter_batch(const plan::ScalarFilter &f, const ColumnVec &col,
                       std::size_t row) {
  switch (col.kind) {
    case ValueKind::Int64: {
      const double lit = std::holds_alternative<double>(f.value)
                             ? std::get<double>(f.value)
                             : static_cast<double>(std::get<std::int64_t>(f.value));
      return compare_numeric(static_cast<double>(col.i64[row]), f.op, lit);
    }
    case ValueKind::Float64: {
      const double lit = std::holds_alternative<double>(f.value)
                             ? std::get<double>(f.value)
                             : static_cast<double>(std::get<std::int64_t>(f.value));
      return compare_numeric(col.f64[row], f.op, lit);
    }
    case ValueKind::String:
      return compare_string(col.str[row], f.op, std::get<std::string>(f.value));
  }
  return false;
}

Batch make_batch(const Schema &schema) {
  Batch b;
  b.columns.resize(schema.kinds.size());
  for (std::size_t i = 0; i < schema.kinds.size(); ++i)
    b.columns[i].kind = schema.kinds[i];
  return b;
}

double eval_expr(const plan::ExprPtr &expr, const Schema &schema,
                 const Batch &batch, std::size_t row) {
  switch (expr->op) {
    case plan::Expr::Op::Const: return expr->value;
    case plan::Expr::Op::Column: {
      const auto idx =
          schema.index_of(plan::qualified(expr->relation, expr->column));
      const auto &col = batch.columns[idx];
      return col.kind == ValueKind::Int64
                 ? static_cast<double>(col.i64[row])
                 : col.f64[row];
    }
    case plan::Expr::Op::Add:
      return eval_expr(expr->lhs, schema, batch, row) +
             eval_expr(expr->rhs, schema, batch, row);
    case plan::Expr::Op::Sub:
      return eval_expr(expr->lhs, schema, batch, row) -
             eval_expr(expr->rhs, schema, batch, row);
    case plan::Expr::Op::Mul:
      return eval_expr(expr->lhs, schema, batch, row) *
             eval_expr(expr->rhs, schema, batch, row);
  }
  return 0.0;
}

class Operator {
 public:
  explicit Operator(PhysicalNode *node) : node_(node) {
    node_->observed_rows = 0;
    node_->elapsed_total_ms = 0.0;
  }
  virtual ~Operator() = default;

  bool next(Batch &out) {
    out.clear();
    const double t0 = now_ms();
    const bool more = produce(out);
    node_->elapsed_total_ms += now_ms() - t0;
    if (more) node_->observed_rows += static_cast<std::int64_t>(out.rows);
    return more;
  }

  const Schema &schema() const { return schema_; }

 protected:
  virtual bool produce(Batch &out) = 0;

  PhysicalNode *node_;
  Schema schema_;
};

class SeqScanOp final : public Operator {
 public:
  SeqScanOp(PhysicalNode *node, const Catalog &catalog)
      : Operator(node), rel_(catalog.relation(node->relation)) {
    for (const auto &name : node->scan_columns) {
      const auto &col = rel_.column(name);
      schema_.names.push_back(plan::qualified(rel_.name(), name));
      schema_.kinds.push_back(value_kind(col));
      cols_.push_back(&col);
    }
    if (node->vector_predicate) {
      const auto &pred = *node->vector_predicate;
      vec_col_ = &rel_.column(pred.column);
      if (vec_col_->type().kind != ColumnKind::Vector ||
          pred.query_vector.dim() != vec_col_->type().dim)
        throw DataError("vector predicate dim mismatch on " + pred.relation +
                        "." + pred.column);
      threshold_sq_ = pred.threshold * pred.threshold;
      schema_.names.push_back(pred.dist_name());
      schema_.kinds.push_back(ValueKind::Float64);
    }
  }

 protected:
  bool produce(Batch &out) override {
    if (row_ >= rel_.row_count()) return false;
    if (out.columns.empty()) out = make_batch(schema_);
    while (row_ < rel_.row_count() && out.rows < kBatchRows) {
      const std::size_t row = row_++;
      bool pass = true;
      for (const auto &f : node_->filters) {
        if (!eval_filter_base(f, rel_.column(f.column), row)) {
          pass = false;
          break;
        }
      }
      if (!pass) continue;
      double dist = 0.0;
      if (vec_col_ != nullptr) {
        const double dsq = vindex::l2_distance_sq(
            vec_col_->vector_at(row),
            node_->vector_predicate->query_vector.components);
        if (!(dsq < threshold_sq_)) continue;
        dist = std::sqrt(dsq);
      }
      for (std::size_t i = 0; i < cols_.size(); ++i)
        append_base_value(out.columns[i], *cols_[i], row);
      if (vec_col_ != nullptr) out.columns.back().f64.push_back(dist);
      ++out.rows;
    }
    return true;
  }

 private:
  const storage::Relation &rel_;
  std::vector<const storage::Column *> cols_;
  const storage::Column *vec_col_ = nullptr;
  double threshold_sq_ = 0.0;
  std::size_t row_ = 0;
};

class VectorIndexScanOp final : public Operator {
 public:
  VectorIndexScanOp(PhysicalNode *node, const Catalog &catalog,
                    ExecStats &stats)
      : Operator(node), catalog_(catalog), stats_(stats),
        rel_(catalog.relation(node->relation)) {
    if (!node->vector_predicate)
      throw InternalError("VectorIndexScan without a vector predicate");
    for (const auto &name : node->scan_columns) {
      const auto &col = rel_.column(name);
      schema_.names.push_back(plan::qualified(rel_.name(), name));
      schema_.kinds.push_back(value_kind(col));
      cols_.push_back(&col);
    }
    schema_.names.push_back(node->vector_predicate->dist_name());
    schema_.kinds.push_back(ValueKind::Float64);
  }

 protected:
  bool produce(Batch &out) override {
    if (!fetched_) {
      fetched_ = true;
      const auto &pred = *node_->vector_predicate;
      if (node_->ecqo_cache) {
        rows_ = node_->ecqo_cache->row_ids;
        dists_ = node_->ecqo_cache->distances;
      } else {
        const auto *index = catalog_.find_index(pred.relation, pred.column);
        if (index == nullptr)
          throw DataError("no vector index on " + pred.relation + "." +
                          pred.column + " at execution time");
        auto res =
            index->range_search(pred.query_vector.components, pred.threshold);
        ++stats_.ann_probe_count;
        rows_ = std::move(res.row_ids);
        dists_ = std::move(res.distances);
      }
    }
    if (pos_ >= rows_.size()) return false;
    if (out.columns.empty()) out = make_batch(schema_);
    while (pos_ < rows_.size() && out.rows < kBatchRows) {
      const std::size_t row = rows_[pos_];
      for (std::size_t i = 0; i < cols_.size(); ++i)
        append_base_value(out.columns[i], *cols_[i], row);
      out.columns.back().f64.push_back(dists_[pos_]);
      ++pos_;
      ++out.rows;
    }
    return true;
  }

 private:
  const Catalog &catalog_;
  ExecStats &stats_;
  const storage::Relation &rel_;
  std::vector<const storage::Column *> cols_;
  bool fetched_ = false;
  std::vector<std::uint32_t> rows_;
  std::vector<double> dists_;
  std::size_t pos_ = 0;
};

class FilterOp final : public Operator {
 public:
  FilterOp(PhysicalNode *node, std::unique_ptr<Operator> child)
      : Operator(node), child_(std::move(child)) {
    schema_ = child_->schema();
    for (const auto &f : node->filters)
      filter_cols_.push_back(
          schema_.index_of(plan::qualified(f.relation, f.column)));
  }

 protected:
  bool produce(Batch &out) override {
    Batch in;
    if (!child_->next(in)) return false;
    out = make_batch(schema_);
    for (std::size_t row = 0; row < in.rows; ++row) {
      bool pass = true;
      for (std::size_t i = 0; i < node_->filters.size(); ++i) {
        if (!eval_filter_batch(node_->filters[i], in.columns[filter_cols_[i]],
                               row)) {
          pass = false;
          break;
        }
      }
      if (!pass) continue;
      for (std::size_t c = 0; c < schema_.names.size(); ++c)
        append_from(out.columns[c], in.columns[c], row);
      ++out.rows;
    }
    return true;
  }

 private:
  std::unique_ptr<Operator> child_;
  std::vector<std::size_t> filter_cols_;
};

class HashJoinOp final : public Operator {
 public:
  HashJoinOp(PhysicalNode *node, std::unique_ptr<Operator> left,
             std::unique_ptr<Operator> right)
      : Operator(node), left_(std::move(left)), right_(std::move(right)) {
    schema_.names = left_->schema().names;
    schema_.kinds = left_->schema().kinds;
    schema_.names.insert(schema_.names.end(), right_->schema().names.begin(),
                         right_->schema().names.end());
    schema_.kinds.insert(schema_.kinds.end(), right_->schema().kinds.begin(),
                         right_->schema().kinds.end());

    build_is_left_ = node->build_child == 0;
    auto &build_schema = build_is_left_ ? left_->schema() : right_->schema();
    auto &probe_schema = build_is_left_ ? right_->schema() : left_->schema();
    build_key_ = build_schema.index_of(build_is_left_ ? node->left_key
                                                      : node->right_key);
    probe_key_ = probe_schema.index_of(build_is_left_ ? node->right_key
                                                      : node->left_key);
    if (build_schema.kinds[build_key_] != ValueKind::Int64 ||
        probe_schema.kinds[probe_key_] != ValueKind::Int64)
      throw DataError("hash join key type mismatch: keys must be int64");
    for (const auto &[l, r] : node->extra_keys) {
      extra_build_.push_back(build_schema.index_of(build_is_left_ ? l : r));
      extra_probe_.push_back(probe_schema.index_of(build_is_left_ ? r : l));
    }
  }

 protected:
  bool produce(Batch &out) override {
    if (!built_) build();
    Operator *probe = build_is_left_ ? right_.get() : left_.get();
    Batch in;
    if (!probe->next(in)) return false;
    out = make_batch(schema_);
    const std::size_t left_width = left_->schema().names.size();
    for (std::size_t row = 0; row < in.rows; ++row) {
      const auto key = in.columns[probe_key_].i64[row];
      const auto it = table_.find(key);
      if (it == table_.end()) continue;
      for (const auto build_row : it->second) {
        bool pass = true;
        for (std::size_t e = 0; e < extra_build_.size(); ++e) {
          if (build_store_[extra_build_[e]].i64[build_row] !=
              in.columns[extra_probe_[e]].i64[row]) {
            pass = false;
            break;
          }
        }
        if (!pass) continue;
        // Emit in left-then-right order regardless of build side.
        if (build_is_left_) {
          for (std::size_t c = 0; c < left_width; ++c)
            append_from(out.columns[c], build_store_[c], build_row);
          for (std::size_t c = 0; c < in.columns.size(); ++c)
            append_from(out.columns[left_width + c], in.columns[c], row);
        } else {
          for (std::size_t c = 0; c < left_width; ++c)
            append_from(out.columns[c], in.columns[c], row);
          for (std::size_t c = 0; c < build_store_.size(); ++c)
            append_from(out.columns[left_width + c], build_store_[c],
                        build_row);
        }
        ++out.rows;
      }
    }
    return true;
  }

 private:
  void build() {
    built_ = true;
    Operator *build_child = build_is_left_ ? left_.get() : right_.get();
    const auto &bschema = build_child->schema();
    build_store_.resize(bschema.kinds.size());
    for (std::size_t i = 0; i < bschema.kinds.size(); ++i)
      build_store_[i].kind = bschema.kinds[i];
    Batch in;
    std::size_t total = 0;
    while (build_child->next(in)) {
      for (std::size_t row = 0; row < in.rows; ++row) {
        table_[in.columns[build_key_].i64[row]].push_back(total);
        for (std::size_t c = 0; c < in.columns.size(); ++c)
          append_from(build_store_[c], in.columns[c], row);
        ++total;
      }
    }
  }

  std::unique_ptr<Operator> left_, right_;
  bool build_is_left_ = false;
  bool built_ = false;
  std::size_t build_key_ = 0, probe_key_ = 0;
  std::vector<std::size_t> extra_build_, extra_probe_;
  std::vector<ColumnVec> build_store_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> table_;
};

class IndexNestedLoopJoinOp final : public Operator {
 public:
  IndexNestedLoopJoinOp(PhysicalNode *node, std::unique_ptr<Operator> outer,
                        const Catalog &catalog)
      : Operator(node), outer_(std::move(outer)), catalog_(catalog),
        inner_rel_(catalog.relation(node->inner_relation)) {
    schema_.names = outer_->schema().names;
    schema_.kinds = outer_->schema().kinds;
    for (const auto &name : node->inner_columns) {
      const auto &col = inner_rel_.column(name);
      schema_.names.push_back(plan::qualified(inner_rel_.name(), name));
      schema_.kinds.push_back(value_kind(col));
      inner_cols_.push_back(&col);
    }
    outer_key_ = outer_->schema().index_of(node->left_key);
    if (outer_->schema().kinds[outer_key_] != ValueKind::Int64)
      throw DataError("index nested loop join key type mismatch");
    for (const auto &[l, r] : node->extra_keys) {
      extra_outer_.push_back(outer_->schema().index_of(l));
      const auto [rel, col] = std::make_pair(
          r.substr(0, r.find('.')), r.substr(r.find('.') + 1));
      extra_inner_.push_back(&inner_rel_.column(col));
    }
  }

 protected:
  bool produce(Batch &out) override {
    if (key_index_ == nullptr)
      key_index_ =
          &catalog_.key_index(node_->inner_relation, node_->inner_key_column);
    Batch in;
    if (!outer_->next(in)) return false;
    out = make_batch(schema_);
    const std::size_t outer_width = outer_->schema().names.size();
    for (std::size_t row = 0; row < in.rows; ++row) {
      const auto key = in.columns[outer_key_].i64[row];
      const auto it = key_index_->rows_by_key.find(key);
      if (it == key_index_->rows_by_key.end()) continue;
      for (const auto inner_row : it->second) {
        bool pass = true;
        for (std::size_t e = 0; e < extra_outer_.size() && pass; ++e)
          pass = in.columns[extra_outer_[e]].i64[row] ==
                 base_int(*extra_inner_[e], inner_row);
        for (const auto &f : node_->inner_filters) {
          if (!pass) break;
          pass = eval_filter_base(f, inner_rel_.column(f.column), inner_row);
        }
        if (!pass) continue;
        for (std::size_t c = 0; c < outer_width; ++c)
          append_from(out.columns[c], in.columns[c], row);
        for (std::size_t c = 0; c < inner_cols_.size(); ++c)
          append_base_value(out.columns[outer_width + c], *inner_cols_[c],
                            inner_row);
        ++out.rows;
      }
    }
    return true;
  }

 private:
  std::unique_ptr<Operator> outer_;
  const Catalog &catalog_;
  const storage::Relation &inner_rel_;
  std::vector<const storage::Column *> inner_cols_;
  std::vector<std::size_t> extra_outer_;
  std::vector<const storage::Column *> extra_inner_;
  std::size_t outer_key_ = 0;
  const KeyIndex *key_index_ = nullptr;
};

// Total-order comparison helpers shared by Sort and Aggregate so every plan
// renders identical output orders.
int compare_values(const ColumnVec &a, std::size_t ra, const ColumnVec &b,
                   std::size_t rb) {
  switch (a.kind) {
    case ValueKind::Int64:
      if (a.i64[ra] < b.i64[rb]) return -1;
      if (a.i64[ra] > b.i64[rb]) return 1;
      return 0;
    case ValueKind::Float64:
      if (a.f64[ra] < b.f64[rb]) return -1;
      if (a.f64[ra] > b.f64[rb]) return 1;
      return 0;
    case ValueKind::String:
      if (a.str[ra] < b.str[rb]) return -1;
      if (a.str[ra] > b.str[rb]) return 1;
      return 0;
  }
  return 0;
}

class SortOp final : public Operator {
 public:
  SortOp(PhysicalNode *node, std::unique_ptr<Operator> child)
      : Operator(node), child_(std::move(child)) {
    schema_ = child_->schema();
    for (const auto &k : node->sort_keys)
      key_cols_.push_back(schema_.index_of(k.column));
  }

 protected:
  bool produce(Batch &out) override {
    if (!sorted_) drain_and_sort();
    if (pos_ >= order_.size()) return false;
    out = make_batch(schema_);
    while (pos_ < order_.size() && out.rows < kBatchRows) {
      const std::size_t row = order_[pos_++];
      for (std::size_t c = 0; c < store_.size(); ++c)
        append_from(out.columns[c], store_[c], row);
      ++out.rows;
    }
    return true;
  }

 private:
  void drain_and_sort() {
    sorted_ = true;
    store_.resize(schema_.kinds.size());
    for (std::size_t i = 0; i < schema_.kinds.size(); ++i)
      store_[i].kind = schema_.kinds[i];
    Batch in;
    std::size_t total = 0;
    while (child_->next(in)) {
      for (std::size_t row = 0; row < in.rows; ++row) {
        for (std::size_t c = 0; c < in.columns.size(); ++c)
          append_from(store_[c], in.columns[c], row);
        ++total;
      }
    }
    order_.resize(total);
    for (std::size_t i = 0; i < total; ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      for (std::size_t k = 0; k < key_cols_.size(); ++k) {
        const int c = compare_values(store_[key_cols_[k]], a,
                                     store_[key_cols_[k]], b);
        if (c != 0) return node_->sort_keys[k].ascending ? c < 0 : c > 0;
      }
      return false;
    });
  }

  std::unique_ptr<Operator> child_;
  std::vector<std::size_t> key_cols_;
  std::vector<ColumnVec> store_;
  std::vector<std::size_t> order_;
  bool sorted_ = false;
  std::size_t pos_ = 0;
};

class AggregateOp final : public Operator {
 public:
  AggregateOp(PhysicalNode *node, std::unique_ptr<Operator> child)
      : Operator(node), child_(std::move(child)) {
    if (!node->aggregate) throw InternalError("Aggregate without spec");
    const auto &spec = *node->aggregate;
    for (const auto &g : spec.group_by) {
      const auto idx = child_->schema().index_of(g);
      group_cols_.push_back(idx);
      schema_.names.push_back(g);
      schema_.kinds.push_back(child_->schema().kinds[idx]);
    }
    for (const auto &item : spec.items) {
      schema_.names.push_back(item.output_name);
      schema_.kinds.push_back(item.func == plan::AggFunc::Count
                                  ? ValueKind::Int64
                                  : ValueKind::Float64);
    }
  }

 protected:
  bool produce(Batch &out) override {
    if (!done_) aggregate_all();
    if (pos_ >= groups_.size()) return false;
    out = make_batch(schema_);
    const auto &items = node_->aggregate->items;
    while (pos_ < groups_.size() && out.rows < kBatchRows) {
      auto &g = groups_[pos_++];
      for (std::size_t c = 0; c < group_cols_.size(); ++c)
        append_from(out.columns[c], key_store_[c], g.key_row);
      for (std::size_t i = 0; i < items.size(); ++i) {
        auto &col = out.columns[group_cols_.size() + i];
        switch (items[i].func) {
          case plan::AggFunc::Count:
            col.i64.push_back(g.count);
            break;
          case plan::AggFunc::Sum:
            col.f64.push_back(sorted_sum(g.values[i]));
            break;
          case plan::AggFunc::Avg:
            col.f64.push_back(g.count == 0
                                  ? 0.0
                                  : sorted_sum(g.values[i]) /
                                        static_cast<double>(g.count));
            break;
          case plan::AggFunc::Min:
            col.f64.push_back(g.minmax[i].first);
            break;
          case plan::AggFunc::Max:
            col.f64.push_back(g.minmax[i].second);
            break;
        }
      }
      ++out.rows;
    }
    return true;
  }

 private:
  struct Group {
    std::size_t key_row = 0;
    std::int64_t count = 0;
    std::vector<std::vector<double>> values;         // per Sum/Avg item
    std::vector<std::pair<double, double>> minmax;   // per item
  };

  // Order-independent summation: inputs sorted before accumulation so all
  // join orders produce bit-identical aggregates.
  static double sorted_sum(std::vector<double> &vals) {
    std::sort(vals.begin(), vals.end());
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc;
  }

  void aggregate_all() {
    done_ = true;
    const auto &items = node_->aggregate->items;
    key_store_.resize(group_cols_.size());
    for (std::size_t c = 0; c < group_cols_.size(); ++c)
      key_store_[c].kind = child_->schema().kinds[group_cols_[c]];

    std::unordered_map<std::string, std::size_t> index;
    Batch in;
    while (child_->next(in)) {
      for (std::size_t row = 0; row < in.rows; ++row) {
        std::string key;
        for (const auto gc : group_cols_) {
          const auto &col = in.columns[gc];
          switch (col.kind) {
            case ValueKind::Int64:
              key.append(reinterpret_cast<const char *>(&col.i64[row]),
                         sizeof(std::int64_t));
              break;
            case ValueKind::Float64:
              key.append(reinterpret_cast<const char *>(&col.f64[row]),
                         sizeof(double));
              break;
            case ValueKind::String:
              key += col.str[row];
              key.push_back('\0');
              break;
          }
        }
        auto [it, inserted] = index.emplace(key, groups_.size());
        if (inserted) {
          Group g;
          g.key_row = keys_stored_;
          g.values.resize(items.size());
          g.minmax.assign(items.size(),
                          {std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()});
          for (std::size_t c = 0; c < group_cols_.size(); ++c)
            append_from(key_store_[c], in.columns[group_cols_[c]], row);
          ++keys_stored_;
          groups_.push_back(std::move(g));
        }
        auto &g = groups_[it->second];
        ++g.count;
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (items[i].func == plan::AggFunc::Count) continue;
          const double v = eval_expr(items[i].input, child_->schema(), in, row);
          switch (items[i].func) {
            case plan::AggFunc::Sum:
            case plan::AggFunc::Avg:
              g.values[i].push_back(v);
              break;
            case plan::AggFunc::Min:
              g.minmax[i].first = std::min(g.minmax[i].first, v);
              break;
            case plan::AggFunc::Max:
              g.minmax[i].second = std::max(g.minmax[i].second, v);
              break;
            case plan::AggFunc::Count:
              break;
          }
        }
      }
    }

    // Deterministic group order: sort by group key values.
    std::vector<std::size_t> order(groups_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      for (std::size_t c = 0; c < key_store_.size(); ++c) {
        const int cmp = compare_values(key_store_[c], groups_[a].key_row,
                                       key_store_[c], groups_[b].key_row);
        if (cmp != 0) return cmp < 0;
      }
      return false;
    });
    std::vector<Group> sorted;
    sorted.reserve(groups_.size());
    for (const auto i : order) sorted.push_back(std::move(groups_[i]));
    groups_ = std::move(sorted);
  }

  std::unique_ptr<Operator> child_;
  std::vector<std::size_t> group_cols_;
  std::vector<ColumnVec> key_store_;
  std::size_t keys_stored_ = 0;
  std::vector<Group> groups_;
  bool done_ = false;
  std::size_t pos_ = 0;
};

class LimitOp final : public Operator {
 public:
  LimitOp(PhysicalNode *node, std::unique_ptr<Operator> child)
      : Operator(node), child_(std::move(child)) {
    schema_ = child_->schema();
  }

 protected:
  bool produce(Batch &out) override {
    if (remaining_ == 0) return false;
    Batch in;
    if (!child_->next(in)) return false;
    if (in.rows <= remaining_) {
      remaining_ -= in.rows;
      out = std::move(in);
      return true;
    }
    out = make_batch(schema_);
    for (std::size_t row = 0; row < remaining_; ++row) {
      for (std::size_t c = 0; c < in.columns.size(); ++c)
        append_from(out.columns[c], in.columns[c], row);
      ++out.rows;
    }
    remaining_ = 0;
    return true;
  }

 private:
  std::unique_ptr<Operator> child_;
  std::size_t remaining_ = node_->limit;
};

std::unique_ptr<Operator> build_operator(PhysicalNode *node,
                                         const Catalog &catalog,
                                         ExecStats &stats) {
  switch (node->op) {
    case PhysOp::SeqScan:
      return std::make_unique<SeqScanOp>(node, catalog);
    case PhysOp::VectorIndexScan:
      return std::make_unique<VectorIndexScanOp>(node, catalog, stats);
    case PhysOp::Filter:
      return std::make_unique<FilterOp>(
          node, build_operator(node->child(0), catalog, stats));
    case PhysOp::HashJoin:
      return std::make_unique<HashJoinOp>(
          node, build_operator(node->child(0), catalog, stats),
          build_operator(node->child(1), catalog, stats));
    case PhysOp::IndexNestedLoopJoin:
      return std::make_unique<IndexNestedLoopJoinOp>(
          node, build_operator(node->child(0), catalog, stats), catalog);
    case PhysOp::Sort:
      return std::make_unique<SortOp>(
          node, build_operator(node->child(0), catalog, stats));
    case PhysOp::Aggregate:
      return std::make_unique<AggregateOp>(
          node, build_operator(node->child(0), catalog, stats));
    case PhysOp::Limit:
      return std::make_unique<LimitOp>(
          node, build_operator(node->child(0), catalog, stats));
  }
  throw InternalError("unknown physical operator");
}

void finalize_timings(PhysicalNode *node) {
  double child_total = 0.0;
  for (auto &c : node->children) {
    finalize_timings(c.get());
    child_total += c->elapsed_total_ms;
  }
  node->elapsed_ms = std::max(0.0, node->elapsed_total_ms - child_total);
}

void collect_vector_observed(const PhysicalNode *node, ExecStats &stats) {
  if (node->vector_predicate) {
    stats.vector_observed[plan::qualified(node->vector_predicate->relation,
                                          node->vector_predicate->column)] =
        node->observed_rows;
  }
  for (const auto &c : node->children)
    collect_vector_observed(c.get(), stats);
}

}  // namespace

nlohmann::json ExecStats::to_json() const {
  nlohmann::json j;
  j["result_rows"] = result_rows;
  j["total_ms"] = total_ms;
  j["ann_probe_count"] = ann_probe_count;
  j["vector_observed"] = vector_observed;
  return j;
}

ResultSet execute(plan::PhysicalPlan &plan, const Catalog &catalog,
                  ExecStats &stats,
                  card::VectorCardinalityEstimator *feedback_sink) {
  plan.reset_observed();
  stats = ExecStats{};

  const auto t0 = std::chrono::steady_clock::now();
  auto root = build_operator(plan.root.get(), catalog, stats);

  ResultSet result;
  result.schema.names = plan.output_columns;
  std::vector<std::size_t> projection;
  for (const auto &name : plan.output_columns) {
    const auto idx = root->schema().index_of(name);
    projection.push_back(idx);
    result.schema.kinds.push_back(root->schema().kinds[idx]);
  }
  result.columns.resize(projection.size());
  for (std::size_t i = 0; i < projection.size(); ++i)
    result.columns[i].kind = result.schema.kinds[i];

  Batch batch;
  while (root->next(batch)) {
    for (std::size_t row = 0; row < batch.rows; ++row) {
      for (std::size_t c = 0; c < projection.size(); ++c)
        append_from(result.columns[c], batch.columns[projection[c]], row);
    }
    result.rows += batch.rows;
  }
  const auto t1 = std::chrono::steady_clock::now();

  finalize_timings(plan.root.get());
  stats.result_rows = static_cast<std::int64_t>(result.rows);
  stats.total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  collect_vector_observed(plan.root.get(), stats);

  if (feedback_sink != nullptr) {
    for (const auto &pe : plan.vector_estimates) {
      const auto key =
          plan::qualified(pe.predicate.relation, pe.predicate.column);
      const auto it = stats.vector_observed.find(key);
      if (it != stats.vector_observed.end())
        feedback_sink->feedback(catalog, pe.predicate, pe.estimate.value,
                                it->second);
    }
  }
  return result;
}

void write_result_csv(const ResultSet &result, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open result CSV for writing: " + path);
  for (std::size_t i = 0; i < result.schema.names.size(); ++i) {
    if (i) out << ',';
    out << result.schema.names[i];
  }
  out << '\n';
  for (std::size_t row = 0; row < result.rows; ++row) {
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
      if (c) out << ',';
      const auto &col = result.columns[c];
      switch (col.kind) {
        case ValueKind::Int64: out << col.i64[row]; break;
        case ValueKind::Float64: {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.17g", col.f64[row]);
          out << buf;
          break;
        }
        case ValueKind::String: out << col.str[row]; break;
      }
    }
    out << '\n';
  }
}

std::vector<std::string> canonical_rows(const ResultSet &result) {
  std::vector<std::string> rows;
  rows.reserve(result.rows);
  for (std::size_t row = 0; row < result.rows; ++row) {
    std::string s;
    for (const auto &col : result.columns) {
      switch (col.kind) {
        case ValueKind::Int64:
          s += 'i' + std::to_string(col.i64[row]);
          break;
        case ValueKind::Float64: {
          char buf[40];
          std::snprintf(buf, sizeof(buf), "f%a", col.f64[row]);
          s += buf;
          break;
        }
        case ValueKind::String:
          s += 's' + col.str[row];
          break;
      }
      s.push_back('|');
    }
    rows.push_back(std::move(s));
  }
  return rows;
}

}  // namespace vaq::exec
