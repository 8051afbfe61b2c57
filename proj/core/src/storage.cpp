#include "vaq/storage.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace vaq::storage {

const char *kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::Int64: return "int64";
    case ColumnKind::Float64: return "float64";
    case ColumnKind::String: return "string";
    case ColumnKind::Date: return "date";
    case ColumnKind::Vector: return "vector";
  }
  return "?";
}

VectorValue make_vector_value(std::span<const float> components) {
  for (float c : components) {
    if (!std::isfinite(c))
      throw DataError("vector value contains a non-finite component");
  }
  return VectorValue{{components.begin(), components.end()}};
}

Column::Column(std::string name, ColumnType type)
    : name_(std::move(name)), type_(type) {
  if (type_.kind == ColumnKind::Vector && type_.dim < 1)
    throw DataError("vector column '" + name_ + "' has invalid dim 0");
}

std::size_t Column::size() const {
  switch (type_.kind) {
    case ColumnKind::Int64: return ints_.size();
    case ColumnKind::Float64: return floats_.size();
    case ColumnKind::String: return strings_.size();
    case ColumnKind::Date: return dates_.size();
    case ColumnKind::Vector: return vecs_.size() / type_.dim;
  }
  return 0;
}

void Column::append_int(std::int64_t v) { ints_.push_back(v); }
void Column::append_float(double v) { floats_.push_back(v); }
void Column::append_string(std::string v) { strings_.push_back(std::move(v)); }
void Column::append_date(std::int32_t days) { dates_.push_back(days); }

void Column::append_vector(std::span<const float> v) {
  if (v.size() != type_.dim)
    throw DataError("vector length " + std::to_string(v.size()) +
                    " does not match column '" + name_ + "' dim " +
                    std::to_string(type_.dim));
  for (float c : v) {
    if (!std::isfinite(c))
      throw DataError("non-finite vector component in column '" + name_ + "'");
  }
  vecs_.insert(vecs_.end(), v.begin(), v.end());
}

void Column::compute_stats() {
  ColumnStats s;
  switch (type_.kind) {
    case ColumnKind::Int64: {
      std::unordered_set<std::int64_t> distinct(ints_.begin(), ints_.end());
      s.ndv = static_cast<std::int64_t>(distinct.size());
      if (!ints_.empty()) {
        auto [mn, mx] = std::minmax_element(ints_.begin(), ints_.end());
        s.min_value = static_cast<double>(*mn);
        s.max_value = static_cast<double>(*mx);
        s.has_range = true;
      }
      break;
    }
    case ColumnKind::Date: {
      std::unordered_set<std::int32_t> distinct(dates_.begin(), dates_.end());
      s.ndv = static_cast<std::int64_t>(distinct.size());
      if (!dates_.empty()) {
        auto [mn, mx] = std::minmax_element(dates_.begin(), dates_.end());
        s.min_value = static_cast<double>(*mn);
        s.max_value = static_cast<double>(*mx);
        s.has_range = true;
      }
      break;
    }
    case ColumnKind::Float64: {
      std::unordered_set<double> distinct(floats_.begin(), floats_.end());
      s.ndv = static_cast<std::int64_t>(distinct.size());
      if (!floats_.empty()) {
        auto [mn, mx] = std::minmax_element(floats_.begin(), floats_.end());
        s.min_value = *mn;
        s.max_value = *mx;
        s.has_range = true;
      }
      break;
    }
    case ColumnKind::String: {
      std::unordered_set<std::string> distinct(strings_.begin(),
                                               strings_.end());
      s.ndv = static_cast<std::int64_t>(distinct.size());
      break;
    }
    case ColumnKind::Vector:
      s.ndv = static_cast<std::int64_t>(size());
      break;
  }
  stats_ = s;
}

Relation::Relation(
    std::string name,
    const std::vector<std::pair<std::string, ColumnType>> &schema)
    : name_(std::move(name)) {
  if (schema.empty()) throw DataError("relation '" + name_ + "': empty schema");
  std::set<std::string> seen;
  for (const auto &[col_name, type] : schema) {
    if (!seen.insert(col_name).second)
      throw DataError("relation '" + name_ + "': duplicate column name '" +
                      col_name + "'");
    columns_.emplace_back(col_name, type);
  }
}

std::size_t Relation::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name() == name) return i;
  throw DataError("relation '" + name_ + "' has no column '" +
                  std::string(name) + "'");
}

Column &Relation::column(std::string_view name) {
  return columns_[column_index(name)];
}

const Column &Relation::column(std::string_view name) const {
  return columns_[column_index(name)];
}

bool Relation::has_column(std::string_view name) const {
  for (const auto &c : columns_)
    if (c.name() == name) return true;
  return false;
}

void Relation::refresh_row_count() {
  if (columns_.empty()) return;
  const std::size_t first = columns_.front().size();
  for (const auto &c : columns_)
    if (c.size() != first) return;  // partially loaded, keep previous count
  row_count_ = first;
}

void Relation::seal() {
  const std::size_t first = columns_.front().size();
  for (const auto &c : columns_) {
    if (c.size() != first)
      throw DataError("relation '" + name_ + "': column '" + c.name() +
                      "' has " + std::to_string(c.size()) + " rows, expected " +
                      std::to_string(first));
  }
  row_count_ = first;
  for (auto &c : columns_) c.compute_stats();
  sealed_ = true;
}

Relation create_relation(
    std::string name,
    const std::vector<std::pair<std::string, ColumnType>> &schema) {
  return Relation(std::move(name), schema);
}

}  // namespace vaq::storage
