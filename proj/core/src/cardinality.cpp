#include "vaq/cardinality.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "vaq/rng.hpp"

namespace vaq::card {

double heuristic_selectivity(HeuristicMode mode) {
  switch (mode) {
    case HeuristicMode::Pgvector: return 0.333;
    case HeuristicMode::Vbase: return 0.500;
    case HeuristicMode::Duckdb: return 1.000;
  }
  return 1.0;
}

const char *heuristic_mode_name(HeuristicMode mode) {
  switch (mode) {
    case HeuristicMode::Pgvector: return "pgvector";
    case HeuristicMode::Vbase: return "vbase";
    case HeuristicMode::Duckdb: return "duckdb";
  }
  return "?";
}

const char *estimate_source_name(EstimateSource s) {
  switch (s) {
    case EstimateSource::Heuristic: return "heuristic";
    case EstimateSource::Ecqo: return "ecqo";
    case EstimateSource::SamplingFixed: return "sampling-fixed";
    case EstimateSource::SamplingAdaptive: return "sampling-adaptive";
  }
  return "?";
}

CardinalityEstimate estimate_heuristic(std::int64_t row_count,
                                       HeuristicMode mode) {
  if (row_count < 0) throw DataError("estimate_heuristic: negative row count");
  CardinalityEstimate est;
  est.source = EstimateSource::Heuristic;
  est.value = std::llround(heuristic_selectivity(mode) *
                           static_cast<double>(row_count));
  return est;
}

CardinalityEstimate estimate_ecqo(const vindex::HnswIndex &index,
                                  const plan::VectorRangePredicate &predicate) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = std::make_shared<vindex::RangeResult>(index.range_search(
      predicate.query_vector.components, predicate.threshold));
  const auto t1 = std::chrono::steady_clock::now();

  CardinalityEstimate est;
  est.source = EstimateSource::Ecqo;
  est.value = static_cast<std::int64_t>(result->row_ids.size());
  est.cache = std::move(result);
  est.planning_cost_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return est;
}

void SamplingParams::validate() const {
  if (z <= 0.0) throw DataError("sampling: z must be > 0");
  if (p_hat <= 0.0 || p_hat >= 1.0)
    throw DataError("sampling: p_hat must be in (0, 1)");
  if (e <= 0.0 || e >= 1.0)
    throw DataError("sampling: margin of error must be in (0, 1)");
}

std::int64_t compute_sample_size(const SamplingParams &params) {
  params.validate();
  const double n = params.z * params.z * params.p_hat * (1.0 - params.p_hat) /
                   (params.e * params.e);
  return static_cast<std::int64_t>(std::ceil(n));
}

double q_error(std::int64_t estimated, std::int64_t true_card) {
  const double e = static_cast<double>(std::max<std::int64_t>(estimated, 1));
  const double t = static_cast<double>(std::max<std::int64_t>(true_card, 1));
  return std::max(e / t, t / e);
}

std::int64_t sample_size_max(std::int64_t row_count) {
  return std::max<std::int64_t>(385,
                                std::llround(0.05 * static_cast<double>(row_count)));
}

nlohmann::json EstimatorState::to_json() const {
  return nlohmann::json{{"table", table},
                        {"column", column},
                        {"sampling_size", sampling_size},
                        {"momentum", momentum},
                        {"learning_rate", learning_rate},
                        {"updates_applied", updates_applied}};
}

void adapt_sample_size(EstimatorState &state, double observed_q_error,
                       std::int64_t row_count) {
  const auto &h = state.hyper;
  const double ratio_pct =
      row_count > 0
          ? 100.0 * static_cast<double>(state.sampling_size) /
                static_cast<double>(row_count)
          : 0.0;
  const double delta =
      h.alpha * (observed_q_error - h.beta) - (100.0 - h.alpha) * ratio_pct;
  state.momentum = h.momentum_coeff * state.momentum +
                   state.learning_rate * delta;
  state.sampling_size += std::llround(state.momentum);
  state.sampling_size =
      std::clamp(state.sampling_size, kSampleSizeMin, sample_size_max(row_count));
  state.learning_rate *= h.gamma;
  state.q_error_window.clear();
  state.queries_since_update = 0;
  ++state.updates_applied;
}

bool record_feedback(EstimatorState &state, std::int64_t estimated,
                     std::int64_t true_card, std::int64_t row_count) {
  state.q_error_window.push_back(q_error(estimated, true_card));
  ++state.queries_since_update;
  if (static_cast<int>(state.q_error_window.size()) < state.hyper.update_cadence)
    return false;
  const double mean =
      std::accumulate(state.q_error_window.begin(), state.q_error_window.end(),
                      0.0) /
      static_cast<double>(state.q_error_window.size());
  adapt_sample_size(state, mean, row_count);
  return true;
}

CardinalityEstimate estimate_by_sampling(
    const storage::Relation &relation, const std::string &column,
    const plan::VectorRangePredicate &predicate, EstimatorState &state,
    std::uint64_t rng_seed, bool adaptive) {
  const auto t0 = std::chrono::steady_clock::now();
  CardinalityEstimate est;
  est.source = adaptive ? EstimateSource::SamplingAdaptive
                        : EstimateSource::SamplingFixed;

  const auto &col = relation.column(column);
  if (col.type().kind != storage::ColumnKind::Vector)
    throw DataError("estimate_by_sampling: '" + column +
                    "' is not a vector column");
  if (predicate.query_vector.dim() != col.type().dim)
    throw DataError("estimate_by_sampling: query dim mismatch");

  const auto rows = static_cast<std::int64_t>(relation.row_count());
  if (rows == 0) {
    est.value = 0;
    return est;
  }

  const auto sample_size =
      std::min<std::int64_t>(state.sampling_size, rows);
  const double threshold_sq = predicate.threshold * predicate.threshold;

  std::int64_t matches = 0;
  if (sample_size >= rows) {
    for (std::int64_t row = 0; row < rows; ++row) {
      if (vindex::l2_distance_sq(col.vector_at(static_cast<std::size_t>(row)),
                                 predicate.query_vector.components) <
          threshold_sq)
        ++matches;
    }
    est.value = matches;
  } else {
    Rng rng(rng_seed);
    const auto sample = rng.sample_without_replacement(
        static_cast<std::uint32_t>(rows),
        static_cast<std::uint32_t>(sample_size));
    for (const std::uint32_t row : sample) {
      if (vindex::l2_distance_sq(col.vector_at(row),
                                 predicate.query_vector.components) <
          threshold_sq)
        ++matches;
    }
    est.value = std::llround(static_cast<double>(rows) *
                             static_cast<double>(matches) /
                             static_cast<double>(sample_size));
  }
  ++state.estimates_made;
  const auto t1 = std::chrono::steady_clock::now();
  est.planning_cost_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return est;
}

EstimatorKind parse_estimator_kind(const std::string &name) {
  if (name == "heuristic:pgvector") return EstimatorKind::HeuristicPgvector;
  if (name == "heuristic:vbase") return EstimatorKind::HeuristicVbase;
  if (name == "heuristic:duckdb") return EstimatorKind::HeuristicDuckdb;
  if (name == "ecqo") return EstimatorKind::Ecqo;
  if (name == "sampling:fixed") return EstimatorKind::SamplingFixed;
  if (name == "sampling:adaptive") return EstimatorKind::SamplingAdaptive;
  throw UsageError(
      "unknown estimator '" + name +
      "' (valid: heuristic:pgvector, heuristic:vbase, heuristic:duckdb, "
      "ecqo, sampling:fixed, sampling:adaptive)");
}

const char *estimator_kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::HeuristicPgvector: return "heuristic:pgvector";
    case EstimatorKind::HeuristicVbase: return "heuristic:vbase";
    case EstimatorKind::HeuristicDuckdb: return "heuristic:duckdb";
    case EstimatorKind::Ecqo: return "ecqo";
    case EstimatorKind::SamplingFixed: return "sampling:fixed";
    case EstimatorKind::SamplingAdaptive: return "sampling:adaptive";
  }
  return "?";
}

EstimatorFramework::EstimatorFramework(EstimatorKind kind,
                                       SamplingParams sampling,
                                       AdaptiveHyperparams hyper,
                                       std::uint64_t seed)
    : kind_(kind), sampling_(sampling), hyper_(hyper), seed_(seed) {
  sampling_.validate();
}

EstimatorState &EstimatorFramework::state_for(const Catalog &catalog,
                                              const std::string &table,
                                              const std::string &column) {
  auto key = std::make_pair(table, column);
  auto it = states_.find(key);
  if (it != states_.end()) return it->second;

  EstimatorState st;
  st.table = table;
  st.column = column;
  st.hyper = hyper_;
  st.sampling_size = compute_sample_size(sampling_);
  st.learning_rate = hyper_.eta0;
  (void)catalog;
  return states_.emplace(std::move(key), std::move(st)).first->second;
}

const EstimatorState *EstimatorFramework::state(
    const std::string &table, const std::string &column) const {
  auto it = states_.find({table, column});
  return it == states_.end() ? nullptr : &it->second;
}

nlohmann::json EstimatorFramework::states_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &[_, st] : states_) out.push_back(st.to_json());
  return out;
}

std::uint64_t EstimatorFramework::predicate_key(
    const plan::VectorRangePredicate &pred,
    std::uint64_t index_fingerprint) const {
  Fnv1a h;
  h.update_pod(index_fingerprint);
  h.update_pod(pred.threshold);
  h.update(pred.relation);
  h.update(pred.column);
  h.update(pred.query_vector.components.data(),
           pred.query_vector.components.size() * sizeof(float));
  return h.digest();
}

CardinalityEstimate EstimatorFramework::estimate(
    const Catalog &catalog, const plan::VectorRangePredicate &pred) {
  last_planning_cost_ms_ = 0.0;
  switch (kind_) {
    case EstimatorKind::HeuristicPgvector:
    case EstimatorKind::HeuristicVbase:
    case EstimatorKind::HeuristicDuckdb: {
      const auto mode = kind_ == EstimatorKind::HeuristicPgvector
                            ? HeuristicMode::Pgvector
                            : kind_ == EstimatorKind::HeuristicVbase
                                  ? HeuristicMode::Vbase
                                  : HeuristicMode::Duckdb;
      const auto rows = static_cast<std::int64_t>(
          catalog.relation(pred.relation).row_count());
      return estimate_heuristic(rows, mode);
    }
    case EstimatorKind::Ecqo: {
      const auto *index = catalog.find_index(pred.relation, pred.column);
      if (index == nullptr)
        throw DataError("ECQO estimator requires a vector index on " +
                        pred.relation + "." + pred.column +
                        "; build one first (no heuristic fallback)");
      const auto key = predicate_key(pred, index->fingerprint());
      if (auto it = probe_cache_.find(key); it != probe_cache_.end()) {
        auto est = it->second;
        est.planning_cost_ms = 0.0;  // reused, no new search
        return est;
      }
      auto est = estimate_ecqo(*index, pred);
      last_planning_cost_ms_ = est.planning_cost_ms;
      probe_cache_.emplace(key, est);
      return est;
    }
    case EstimatorKind::SamplingFixed:
    case EstimatorKind::SamplingAdaptive: {
      const bool adaptive = kind_ == EstimatorKind::SamplingAdaptive;
      const auto key = predicate_key(pred, 0);
      if (auto it = probe_cache_.find(key); it != probe_cache_.end()) {
        auto est = it->second;
        est.planning_cost_ms = 0.0;
        return est;
      }
      auto &st = state_for(catalog, pred.relation, pred.column);
      const auto &rel = catalog.relation(pred.relation);
      const auto draw_seed =
          mix_seed(mix_seed(seed_, fnv1a(pred.relation + "." + pred.column)),
                   static_cast<std::uint64_t>(st.estimates_made));
      auto est = estimate_by_sampling(rel, pred.column, pred, st, draw_seed,
                                      adaptive);
      last_planning_cost_ms_ = est.planning_cost_ms;
      probe_cache_.emplace(key, est);
      return est;
    }
  }
  throw InternalError("unreachable estimator kind");
}

void EstimatorFramework::feedback(const Catalog &catalog,
                                  const plan::VectorRangePredicate &pred,
                                  std::int64_t estimated,
                                  std::int64_t true_card) {
  if (kind_ != EstimatorKind::SamplingAdaptive) return;
  auto &st = state_for(catalog, pred.relation, pred.column);
  const auto rows =
      static_cast<std::int64_t>(catalog.relation(pred.relation).row_count());
  record_feedback(st, estimated, true_card, rows);
}

}  // namespace vaq::card
