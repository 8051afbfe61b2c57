#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "vaq/catalog.hpp"
#include "vaq/rng.hpp"

namespace vaq::bench {

enum class VectorDistribution {
  GaussianClustered,         // homogeneous clusters (DEEP-style)
  SkewedLognormalClustered,  // skewed cluster sizes and spreads (SIFT-style)
  Uniform,
};

VectorDistribution parse_distribution(const std::string &name);
const char *distribution_name(VectorDistribution d);

// Five-relation analytical schema (part, supplier, partsupp, orders,
// lineitem); partsupp carries two embedding columns and a tag column, part
// carries one embedding column. Row counts scale linearly with
// scale_factor (SF 0.01 = 8000 partsupp rows).
struct BenchmarkSpec {
  double scale_factor = 0.01;
  std::uint32_t vector_dim = 96;
  VectorDistribution distribution = VectorDistribution::GaussianClustered;
  std::uint64_t seed = 42;
  std::uint32_t cluster_count = 8;

  void validate() const;
  nlohmann::json to_json() const;
  static BenchmarkSpec from_json(const nlohmann::json &j);
};

struct TableSizes {
  std::size_t part = 0;
  std::size_t supplier = 0;
  std::size_t partsupp = 0;
  std::size_t orders = 0;
  std::size_t lineitem = 0;
};

TableSizes table_sizes(double scale_factor);

// Deterministic under spec.seed: regenerating yields byte-identical tables.
Catalog generate(const BenchmarkSpec &spec);

// Mean distance over a seeded sample of row pairs; sets the query
// perturbation scale.
double mean_pairwise_distance(const storage::Relation &relation,
                              const std::string &column, Rng &rng,
                              int pairs = 128);

// A stored vector plus gaussian noise with sigma = noise_frac of the mean
// pairwise distance.
storage::VectorValue perturbed_query(const storage::Relation &relation,
                                     const std::string &column, Rng &rng,
                                     double noise_frac = 0.01);

}  // namespace vaq::bench
