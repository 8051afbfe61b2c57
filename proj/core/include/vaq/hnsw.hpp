#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vaq/storage.hpp"

namespace vaq::vindex {

struct HnswParams {
  std::uint32_t m = 16;
  std::uint32_t ef_construction = 200;
  std::uint32_t ef_search = 400;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const HnswParams &) const = default;
};

// Result of a range or top-k search. row_ids/distances are parallel and
// sorted ascending by (distance, row id); every distance is strictly below
// the query threshold for range searches.
struct RangeResult {
  std::vector<std::uint32_t> row_ids;
  std::vector<double> distances;
  std::size_t visited_count = 0;
};

// Exact range scan over a relation's vector column: {row : ||v - q|| < D}.
// Serves as the recall/soundness oracle for the approximate index.
RangeResult brute_force_range(const storage::Relation &relation,
                              const std::string &column,
                              std::span<const float> query, double threshold);

// Squared Euclidean distance, accumulated in double. All range-membership
// tests in the engine compare squared distances against D*D so that index
// and brute-force scans agree bit-for-bit on boundary cases.
double l2_distance_sq(std::span<const float> a, std::span<const float> b);

// Layered proximity graph with deterministic, seeded construction and
// deterministic search. Vector data stays in the indexed relation; the
// index holds row ids and adjacency only.
class HnswIndex {
 public:
  // All rows of relation[column] are inserted in row order. Rebuilding with
  // the same inputs and seed yields an identical graph.
  static HnswIndex build(const storage::Relation &relation,
                         const std::string &column, const HnswParams &params);

  // All vectors strictly within `threshold`, approximately: beam expansion
  // keeps widening until the best unexplored distance exceeds the threshold
  // and at least ef_search candidates were examined. Precision is exact
  // (every returned row satisfies dist < threshold); only recall is
  // approximate.
  RangeResult range_search(std::span<const float> query,
                           double threshold) const;

  RangeResult knn_search(std::span<const float> query, std::size_t k) const;

  const HnswParams &params() const { return params_; }
  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return static_cast<std::size_t>(node_count_); }
  int max_level() const { return max_level_; }
  std::uint32_t entry_point() const { return entry_point_; }

  const std::string &table() const { return table_; }
  const std::string &column() const { return column_; }

  int level_of(std::uint32_t node) const {
    return static_cast<int>(links_[node].size()) - 1;
  }
  const std::vector<std::uint32_t> &neighbors(std::uint32_t node,
                                              int level) const {
    return links_[node][static_cast<std::size_t>(level)];
  }

  // Stable identity for probe caching and catalog matching.
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Total searches answered (range + knn); backs the single-probe checks.
  std::int64_t search_count() const {
    return search_count_.load(std::memory_order_relaxed);
  }

  // The index searches against the column it was built on; after loading a
  // serialized graph the catalog re-attaches the vector data here.
  void attach(const storage::Relation &relation, const std::string &column);

  using Candidate = std::pair<double, std::uint32_t>;  // (dist_sq, row id)

  HnswIndex(const HnswIndex &) = delete;
  HnswIndex &operator=(const HnswIndex &) = delete;
  HnswIndex(HnswIndex &&other) noexcept { *this = std::move(other); }
  HnswIndex &operator=(HnswIndex &&other) noexcept {
    params_ = other.params_;
    dim_ = other.dim_;
    node_count_ = other.node_count_;
    entry_point_ = other.entry_point_;
    max_level_ = other.max_level_;
    table_ = std::move(other.table_);
    column_ = std::move(other.column_);
    fingerprint_ = other.fingerprint_;
    links_ = std::move(other.links_);
    vectors_ = other.vectors_;
    search_count_.store(other.search_count_.load(std::memory_order_relaxed),
                        std::memory_order_relaxed);
    return *this;
  }

 private:
  friend HnswIndex load_index(const std::string &path);
  friend void save_index(const HnswIndex &index, const std::string &path);
  HnswIndex() = default;

  std::span<const float> vector_at(std::uint32_t node) const {
    return {vectors_ + static_cast<std::size_t>(node) * dim_, dim_};
  }

  // Beam search within one level; results ascending by (dist, id), at most
  // `ef` entries. `collector`, when non-null, receives every visited node
  // whose squared distance is below `collect_below_sq`.
  void search_layer(std::span<const float> query, std::uint32_t entry,
                    std::size_t ef, int level,
                    std::vector<Candidate> &out,
                    double widen_below_sq = -1.0,
                    std::vector<Candidate> *collector = nullptr,
                    std::size_t *visited_out = nullptr) const;

  std::uint32_t greedy_descend(std::span<const float> query, int to_level,
                               std::size_t *visited) const;

  std::vector<std::uint32_t> select_neighbors(
      std::span<const float> base, const std::vector<Candidate> &candidates,
      std::size_t max_links) const;

  HnswParams params_;
  std::uint32_t dim_ = 0;
  std::uint32_t node_count_ = 0;
  std::uint32_t entry_point_ = 0;
  int max_level_ = -1;
  std::string table_;
  std::string column_;
  std::uint64_t fingerprint_ = 0;
  // links_[node][level] = neighbor ids; level 0 allows 2*M entries.
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  const float *vectors_ = nullptr;
  mutable std::atomic<std::int64_t> search_count_{0};
};

// Operation-style wrapper matching the build contract.
HnswIndex build_index(const storage::Relation &relation,
                      const std::string &column, const HnswParams &params);

}  // namespace vaq::vindex
