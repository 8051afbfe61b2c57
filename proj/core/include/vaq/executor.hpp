#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vaq/cardinality.hpp"
#include "vaq/catalog.hpp"
#include "vaq/physical_plan.hpp"

namespace vaq::exec {

inline constexpr std::size_t kBatchRows = 1024;

enum class ValueKind { Int64, Float64, String };

// Columnar slice; exactly one payload vector is active per kind.
struct ColumnVec {
  ValueKind kind = ValueKind::Int64;
  std::vector<std::int64_t> i64;
  std::vector<double> f64;
  std::vector<std::string> str;

  std::size_t size() const {
    switch (kind) {
      case ValueKind::Int64: return i64.size();
      case ValueKind::Float64: return f64.size();
      case ValueKind::String: return str.size();
    }
    return 0;
  }
  void clear() {
    i64.clear();
    f64.clear();
    str.clear();
  }
};

struct Schema {
  std::vector<std::string> names;  // qualified
  std::vector<ValueKind> kinds;

  std::size_t index_of(const std::string &name) const;
  bool has(const std::string &name) const;
};

struct Batch {
  std::vector<ColumnVec> columns;
  std::size_t rows = 0;

  void clear() {
    for (auto &c : columns) c.clear();
    rows = 0;
  }
};

// Fully materialized query result.
struct ResultSet {
  Schema schema;
  std::vector<ColumnVec> columns;
  std::size_t rows = 0;
};

struct ExecStats {
  std::int64_t result_rows = 0;
  double total_ms = 0.0;
  // Index searches performed during execution; 0 for ECQO-cached plans.
  std::int64_t ann_probe_count = 0;
  // Observed true cardinality per vector predicate, keyed "rel.col".
  std::map<std::string, std::int64_t> vector_observed;

  nlohmann::json to_json() const;
};

// Pull-based execution over the physical plan. Fills observed_rows and
// per-node timings on the plan, and reports each vector predicate's
// observed cardinality to `feedback_sink` (pass nullptr to skip feedback,
// e.g. on repeated timing runs).
ResultSet execute(plan::PhysicalPlan &plan, const Catalog &catalog,
                  ExecStats &stats,
                  card::VectorCardinalityEstimator *feedback_sink = nullptr);

void write_result_csv(const ResultSet &result, const std::string &path);

// Canonical row rendering (hexfloat for doubles) used for exact multiset
// comparison of results across plans.
std::vector<std::string> canonical_rows(const ResultSet &result);

}  // namespace vaq::exec
