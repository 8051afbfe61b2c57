#include "vaq/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>

#include "vaq/common.hpp"
#include "vaq/rng.hpp"

namespace vaq::vindex {

void HnswParams::validate() const {
  if (m < 2) throw DataError("hnsw: M must be >= 2");
  if (ef_construction < m)
    throw DataError("hnsw: ef_construction must be >= M");
  if (ef_search < 1) throw DataError("hnsw: ef_search must be >= 1");
}

double l2_distance_sq(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

RangeResult brute_force_range(const storage::Relation &relation,
                              const std::string &column,
                              std::span<const float> query, double threshold) {
  const auto &col = relation.column(column);
  if (col.type().kind != storage::ColumnKind::Vector)
    throw DataError("brute_force_range: column '" + column +
                    "' is not a vector column");
  if (query.size() != col.type().dim)
    throw DataError("brute_force_range: query dim " +
                    std::to_string(query.size()) + " != column dim " +
                    std::to_string(col.type().dim));

  const double threshold_sq = threshold > 0 ? threshold * threshold : 0.0;
  const std::size_t n = relation.row_count();
  std::vector<std::pair<double, std::uint32_t>> hits;
  for (std::size_t row = 0; row < n; ++row) {
    const double d = l2_distance_sq(col.vector_at(row), query);
    if (threshold > 0 && d < threshold_sq)
      hits.emplace_back(d, static_cast<std::uint32_t>(row));
  }
  std::sort(hits.begin(), hits.end());
  RangeResult res;
  res.visited_count = n;
  res.row_ids.reserve(hits.size());
  res.distances.reserve(hits.size());
  for (const auto &[d, id] : hits) {
    res.row_ids.push_back(id);
    res.distances.push_back(std::sqrt(d));
  }
  return res;
}

namespace {

using Candidate = HnswIndex::Candidate;

struct MinHeapCmp {
  bool operator()(const Candidate &a, const Candidate &b) const {
    return a > b;  // pop smallest (dist, id) first
  }
};

struct MaxHeapCmp {
  bool operator()(const Candidate &a, const Candidate &b) const {
    return a < b;  // pop largest (dist, id) first
  }
};

}  // namespace

HnswIndex HnswIndex::build(const storage::Relation &relation,
                           const std::string &column,
                           const HnswParams &params) {
  params.validate();
  const auto &col = relation.column(column);
  if (col.type().kind != storage::ColumnKind::Vector)
    throw DataError("build_index: column '" + column +
                    "' is not a vector column");
  if (relation.row_count() == 0)
    throw DataError("build_index: relation '" + relation.name() +
                    "' is empty");

  HnswIndex index;
  index.params_ = params;
  index.dim_ = col.type().dim;
  index.node_count_ = static_cast<std::uint32_t>(relation.row_count());
  index.table_ = relation.name();
  index.column_ = column;
  index.vectors_ = col.vector_data().data();
  index.links_.resize(index.node_count_);

  const double level_factor = 1.0 / std::log(static_cast<double>(params.m));
  Rng rng(params.seed);

  for (std::uint32_t node = 0; node < index.node_count_; ++node) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    int level = static_cast<int>(-std::log(u) * level_factor);
    if (level > 48) level = 48;  // geometric tail guard

    index.links_[node].assign(static_cast<std::size_t>(level) + 1, {});
    const auto q = index.vector_at(node);

    if (node == 0) {
      index.entry_point_ = 0;
      index.max_level_ = level;
      continue;
    }

    std::uint32_t cur = index.entry_point_;
    double cur_dist = l2_distance_sq(q, index.vector_at(cur));

    // Greedy hop down to one level above the node's top level.
    for (int l = index.max_level_; l > level; --l) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::uint32_t nb : index.links_[cur][static_cast<std::size_t>(l)]) {
          const double d = l2_distance_sq(q, index.vector_at(nb));
          if (d < cur_dist || (d == cur_dist && nb < cur)) {
            cur_dist = d;
            cur = nb;
            improved = true;
          }
        }
      }
    }

    // Connect at each level from min(level, max_level_) down to 0.
    for (int l = std::min(level, index.max_level_); l >= 0; --l) {
      std::vector<Candidate> found;
      index.search_layer(q, cur, params.ef_construction, l, found);
      const std::size_t max_links = (l == 0) ? 2 * params.m : params.m;
      auto selected = index.select_neighbors(q, found, max_links);

      auto &own = index.links_[node][static_cast<std::size_t>(l)];
      own = selected;
      for (std::uint32_t nb : selected) {
        auto &back = index.links_[nb][static_cast<std::size_t>(l)];
        back.push_back(node);
        if (back.size() > max_links) {
          // Re-select the neighbor's links under the same diversity rule.
          const auto base = index.vector_at(nb);
          std::vector<Candidate> cand;
          cand.reserve(back.size());
          for (std::uint32_t x : back)
            cand.emplace_back(l2_distance_sq(base, index.vector_at(x)), x);
          std::sort(cand.begin(), cand.end());
          back = index.select_neighbors(base, cand, max_links);
        }
      }
      if (!found.empty()) cur = found.front().second;
    }

    if (level > index.max_level_) {
      index.max_level_ = level;
      index.entry_point_ = node;
    }
  }

  Fnv1a h;
  h.update(index.table_);
  h.update(index.column_);
  h.update_pod(params.m);
  h.update_pod(params.ef_construction);
  h.update_pod(params.ef_search);
  h.update_pod(params.seed);
  h.update_pod(index.node_count_);
  h.update_pod(index.entry_point_);
  index.fingerprint_ = h.digest();
  return index;
}

void HnswIndex::attach(const storage::Relation &relation,
                       const std::string &column) {
  const auto &col = relation.column(column);
  if (col.type().kind != storage::ColumnKind::Vector ||
      col.type().dim != dim_)
    throw DataError("hnsw attach: column '" + column +
                    "' does not match the indexed dim");
  if (relation.row_count() != node_count_)
    throw DataError("hnsw attach: relation has " +
                    std::to_string(relation.row_count()) + " rows, index has " +
                    std::to_string(node_count_) + " nodes");
  table_ = relation.name();
  column_ = column;
  vectors_ = col.vector_data().data();
}

std::vector<std::uint32_t> HnswIndex::select_neighbors(
    std::span<const float> base, const std::vector<Candidate> &candidates,
    std::size_t max_links) const {
  // Diversity heuristic: keep a candidate only if it is closer to the base
  // than to any already-kept neighbor; backfill with the nearest discards.
  std::vector<std::uint32_t> kept;
  std::vector<std::uint32_t> discarded;
  for (const auto &[dist, id] : candidates) {
    if (kept.size() >= max_links) break;
    bool good = true;
    for (std::uint32_t s : kept) {
      const double d_to_kept =
          l2_distance_sq(vector_at(id), vector_at(s));
      if (d_to_kept < dist) {
        good = false;
        break;
      }
    }
    if (good)
      kept.push_back(id);
    else
      discarded.push_back(id);
  }
  for (std::uint32_t id : discarded) {
    if (kept.size() >= max_links) break;
    kept.push_back(id);
  }
  (void)base;
  return kept;
}

void HnswIndex::search_layer(std::span<const float> query, std::uint32_t entry,
                             std::size_t ef, int level,
                             std::vector<Candidate> &out,
                             double widen_below_sq,
                             std::vector<Candidate> *collector,
                             std::size_t *visited_out) const {
  std::unordered_set<std::uint32_t> visited;
  visited.reserve(ef * 4);
  std::priority_queue<Candidate, std::vector<Candidate>, MinHeapCmp> frontier;
  std::priority_queue<Candidate, std::vector<Candidate>, MaxHeapCmp> best;

  const double entry_dist = l2_distance_sq(query, vector_at(entry));
  visited.insert(entry);
  frontier.emplace(entry_dist, entry);
  best.emplace(entry_dist, entry);
  if (collector && entry_dist < widen_below_sq)
    collector->emplace_back(entry_dist, entry);

  while (!frontier.empty()) {
    const auto [dist, node] = frontier.top();
    frontier.pop();
    double bound = best.size() >= ef
                       ? best.top().first
                       : std::numeric_limits<double>::infinity();
    if (collector && widen_below_sq > bound) bound = widen_below_sq;
    if (dist > bound) break;

    for (std::uint32_t nb : links_[node][static_cast<std::size_t>(level)]) {
      if (!visited.insert(nb).second) continue;
      const double d = l2_distance_sq(query, vector_at(nb));
      if (collector && d < widen_below_sq) collector->emplace_back(d, nb);
      double cur_bound = best.size() >= ef
                             ? best.top().first
                             : std::numeric_limits<double>::infinity();
      if (collector && widen_below_sq > cur_bound) cur_bound = widen_below_sq;
      if (d <= cur_bound) {
        frontier.emplace(d, nb);
        best.emplace(d, nb);
        while (best.size() > ef) best.pop();
      }
    }
  }

  out.clear();
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::sort(out.begin(), out.end());
  if (visited_out) *visited_out += visited.size();
}

std::uint32_t HnswIndex::greedy_descend(std::span<const float> query,
                                        int to_level,
                                        std::size_t *visited) const {
  std::uint32_t cur = entry_point_;
  double cur_dist = l2_distance_sq(query, vector_at(cur));
  std::size_t touched = 1;
  for (int l = max_level_; l > to_level; --l) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::uint32_t nb : links_[cur][static_cast<std::size_t>(l)]) {
        const double d = l2_distance_sq(query, vector_at(nb));
        ++touched;
        if (d < cur_dist || (d == cur_dist && nb < cur)) {
          cur_dist = d;
          cur = nb;
          improved = true;
        }
      }
    }
  }
  if (visited) *visited += touched;
  return cur;
}

RangeResult HnswIndex::range_search(std::span<const float> query,
                                    double threshold) const {
  if (query.size() != dim_)
    throw DataError("range_search: query dim " + std::to_string(query.size()) +
                    " != index dim " + std::to_string(dim_));
  search_count_.fetch_add(1, std::memory_order_relaxed);

  RangeResult res;
  if (node_count_ == 0 || threshold <= 0.0) return res;

  const double threshold_sq = threshold * threshold;
  std::size_t visited = 0;
  const std::uint32_t start = greedy_descend(query, 0, &visited);

  // Level-0 beam: at least ef_search candidates are examined, and the beam
  // keeps widening while the nearest unexplored node is inside the ball.
  std::vector<Candidate> beam;
  std::vector<Candidate> matches;
  search_layer(query, start, params_.ef_search, 0, beam, threshold_sq,
               &matches, &visited);

  std::sort(matches.begin(), matches.end());
  matches.erase(std::unique(matches.begin(), matches.end()), matches.end());
  res.row_ids.reserve(matches.size());
  res.distances.reserve(matches.size());
  for (const auto &[d, id] : matches) {
    res.row_ids.push_back(id);
    res.distances.push_back(std::sqrt(d));
  }
  res.visited_count = visited;
  return res;
}

RangeResult HnswIndex::knn_search(std::span<const float> query,
                                  std::size_t k) const {
  if (query.size() != dim_)
    throw DataError("knn_search: query dim " + std::to_string(query.size()) +
                    " != index dim " + std::to_string(dim_));
  if (k < 1) throw DataError("knn_search: k must be >= 1");
  search_count_.fetch_add(1, std::memory_order_relaxed);

  RangeResult res;
  if (node_count_ == 0) return res;

  std::size_t visited = 0;
  const std::uint32_t start = greedy_descend(query, 0, &visited);
  std::vector<Candidate> beam;
  search_layer(query, start, std::max<std::size_t>(params_.ef_search, k), 0,
               beam, -1.0, nullptr, &visited);
  if (beam.size() > k) beam.resize(k);
  res.row_ids.reserve(beam.size());
  res.distances.reserve(beam.size());
  for (const auto &[d, id] : beam) {
    res.row_ids.push_back(id);
    res.distances.push_back(std::sqrt(d));
  }
  res.visited_count = visited;
  return res;
}

HnswIndex build_index(const storage::Relation &relation,
                      const std::string &column, const HnswParams &params) {
  return HnswIndex::build(relation, column, params);
}

}  // namespace vaq::vindex
