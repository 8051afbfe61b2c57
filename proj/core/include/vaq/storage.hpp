#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vaq/common.hpp"

namespace vaq::storage {

enum class ColumnKind { Int64, Float64, String, Date, Vector };

const char *kind_name(ColumnKind k);

// Vector columns carry a fixed dimension; scalar kinds have dim == 0.
struct ColumnType {
  ColumnKind kind = ColumnKind::Int64;
  std::uint32_t dim = 0;

  bool operator==(const ColumnType &) const = default;
};

inline ColumnType int64_type() { return {ColumnKind::Int64, 0}; }
inline ColumnType float64_type() { return {ColumnKind::Float64, 0}; }
inline ColumnType string_type() { return {ColumnKind::String, 0}; }
inline ColumnType date_type() { return {ColumnKind::Date, 0}; }
inline ColumnType vector_type(std::uint32_t dim) {
  return {ColumnKind::Vector, dim};
}

// Fixed-length float32 embedding. Components must be finite.
struct VectorValue {
  std::vector<float> components;

  std::uint32_t dim() const {
    return static_cast<std::uint32_t>(components.size());
  }
};

VectorValue make_vector_value(std::span<const float> components);

// Per-column summary used by the optimizer's scalar selectivity defaults.
struct ColumnStats {
  std::int64_t ndv = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  bool has_range = false;  // true for int64/float64/date columns
};

// Packed columnar storage; exactly one payload vector is active per kind.
class Column {
 public:
  Column(std::string name, ColumnType type);

  const std::string &name() const { return name_; }
  ColumnType type() const { return type_; }
  std::size_t size() const;

  void append_int(std::int64_t v);
  void append_float(double v);
  void append_string(std::string v);
  void append_date(std::int32_t days);
  void append_vector(std::span<const float> v);

  std::int64_t int_at(std::size_t row) const { return ints_[row]; }
  double float_at(std::size_t row) const { return floats_[row]; }
  const std::string &string_at(std::size_t row) const { return strings_[row]; }
  std::int32_t date_at(std::size_t row) const { return dates_[row]; }
  std::span<const float> vector_at(std::size_t row) const {
    return {vecs_.data() + row * type_.dim, type_.dim};
  }

  const std::vector<std::int64_t> &ints() const { return ints_; }
  const std::vector<double> &floats() const { return floats_; }
  const std::vector<std::string> &strings() const { return strings_; }
  const std::vector<std::int32_t> &dates() const { return dates_; }
  const std::vector<float> &vector_data() const { return vecs_; }

  const std::optional<ColumnStats> &stats() const { return stats_; }
  void compute_stats();

 private:
  std::string name_;
  ColumnType type_;
  std::vector<std::int64_t> ints_;
  std::vector<double> floats_;
  std::vector<std::string> strings_;
  std::vector<std::int32_t> dates_;
  std::vector<float> vecs_;
  std::optional<ColumnStats> stats_;
};

// In-memory relation. Append-only; immutable once sealed. Columns may be
// loaded independently (CSV for scalars, fvecs for vectors), so row_count()
// reflects only fully materialized rows; seal() verifies all columns agree.
class Relation {
 public:
  Relation() = default;
  Relation(std::string name,
           const std::vector<std::pair<std::string, ColumnType>> &schema);

  const std::string &name() const { return name_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }

  const std::vector<Column> &columns() const { return columns_; }
  Column &column(std::size_t i) { return columns_[i]; }
  const Column &column(std::size_t i) const { return columns_[i]; }

  std::size_t column_index(std::string_view name) const;
  Column &column(std::string_view name);
  const Column &column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  // Advances row_count to the common column length when all columns agree.
  void refresh_row_count();

  // Verifies every column has the same length, freezes row_count and
  // computes per-column stats. Throws DataError on mismatched lengths.
  void seal();

  bool sealed() const { return sealed_; }

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
  bool sealed_ = false;
};

// Factory matching the schema-validating construction contract.
Relation create_relation(
    std::string name,
    const std::vector<std::pair<std::string, ColumnType>> &schema);

}  // namespace vaq::storage
