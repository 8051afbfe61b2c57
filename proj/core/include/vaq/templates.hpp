#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vaq/calibrate.hpp"
#include "vaq/catalog.hpp"
#include "vaq/query.hpp"

namespace vaq::bench {

// Desired vector-predicate output: an absolute match count or a fraction of
// the predicate relation's rows.
struct Target {
  enum class Kind { MatchCount, Fraction };
  Kind kind = Kind::MatchCount;
  double value = 200;

  static Target match_count(std::int64_t k) {
    return {Kind::MatchCount, static_cast<double>(k)};
  }
  static Target fraction(double f) { return {Kind::Fraction, f}; }
  static Target parse(const std::string &s);  // "k:200" or "frac:0.01"
  std::string str() const;
};

struct VectorSlot {
  std::string relation;
  std::string column;
  bool primary = false;
  // Non-primary slots calibrate at this fixed fraction.
  double secondary_fraction = 0.02;
};

// A fixed query shape: join graph, scalar filter literals, vector predicate
// slots and the aggregate/sort/limit tail. Instantiation fills in a fresh
// query vector and a calibrated threshold per slot.
struct QueryTemplate {
  std::string name;
  std::vector<std::string> relations;
  std::vector<plan::JoinEdge> joins;
  std::vector<plan::ScalarFilter> filters;
  std::vector<VectorSlot> vector_slots;
  std::optional<plan::AggregateSpec> aggregate;
  std::vector<plan::SortKey> sort_keys;
  std::optional<std::size_t> limit;
  std::vector<std::string> output_columns;
};

const std::vector<QueryTemplate> &all_templates();
const QueryTemplate &template_by_name(const std::string &name);
std::vector<std::string> template_names();

struct PredicateMeta {
  std::string relation;
  std::string column;
  double threshold = 0.0;
  std::int64_t oracle_count = 0;  // exact brute-force count for this query
  bool calibration_ok = true;
};

struct InstantiatedQuery {
  plan::LogicalPlan logical;
  std::vector<PredicateMeta> predicates;  // primary slot first
};

// Thresholds may be frozen per (relation.column) to reuse one calibrated D
// across a workload; otherwise each instantiation calibrates its own.
InstantiatedQuery instantiate(
    const QueryTemplate &tmpl, const Catalog &catalog, std::uint64_t seed,
    const Target &target,
    const std::map<std::string, double> *frozen_thresholds = nullptr);

}  // namespace vaq::bench
