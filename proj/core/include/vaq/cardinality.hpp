#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "vaq/catalog.hpp"
#include "vaq/hnsw.hpp"
#include "vaq/query.hpp"

namespace vaq::card {

// Fixed selectivities generalized vector database systems assume for a
// vector similarity predicate, regardless of threshold or data.
enum class HeuristicMode { Pgvector, Vbase, Duckdb };

double heuristic_selectivity(HeuristicMode mode);  // 0.333 / 0.500 / 1.000
const char *heuristic_mode_name(HeuristicMode mode);

enum class EstimateSource { Heuristic, Ecqo, SamplingFixed, SamplingAdaptive };

const char *estimate_source_name(EstimateSource s);

struct CardinalityEstimate {
  std::int64_t value = 0;
  EstimateSource source = EstimateSource::Heuristic;
  double planning_cost_ms = 0.0;
  // Probe result reused by the executor; present iff source == Ecqo.
  std::shared_ptr<const vindex::RangeResult> cache;
};

CardinalityEstimate estimate_heuristic(std::int64_t row_count,
                                       HeuristicMode mode);

// Plan-time index probe. The full candidate set is kept so execution never
// repeats the search.
CardinalityEstimate estimate_ecqo(const vindex::HnswIndex &index,
                                  const plan::VectorRangePredicate &predicate);

struct SamplingParams {
  double z = 1.96;      // critical value
  double p_hat = 0.5;   // proportion estimate
  double e = 0.05;      // margin of error

  void validate() const;
};

// N = ceil(z^2 * p_hat * (1 - p_hat) / e^2)
std::int64_t compute_sample_size(const SamplingParams &params);

// max(est/true, true/est) with both cardinalities floored at 1.
double q_error(std::int64_t estimated, std::int64_t true_card);

struct AdaptiveHyperparams {
  double momentum_coeff = 0.9;  // m
  double eta0 = 0.1;            // initial learning rate
  double alpha = 50.0;          // Q-error vs sampling-ratio weighting
  double beta = 1.5;            // target Q-error
  double gamma = 0.99;          // learning rate decay per update
  int update_cadence = 50;      // feedbacks per sample-size update
};

inline constexpr std::int64_t kSampleSizeMin = 64;
std::int64_t sample_size_max(std::int64_t row_count);  // max(385, 5% of rows)

// Per-(relation, vector column) adaptive sampling controller state.
struct EstimatorState {
  std::string table;
  std::string column;
  std::int64_t sampling_size = 385;
  double momentum = 0.0;      // V_t
  double learning_rate = 0.1;  // eta_t
  int queries_since_update = 0;
  std::vector<double> q_error_window;
  AdaptiveHyperparams hyper;
  std::int64_t updates_applied = 0;
  std::int64_t estimates_made = 0;

  nlohmann::json to_json() const;
};

// One controller step:
//   delta = alpha*(qbar - beta) - (100-alpha)*ratio_pct   (ratio in percent)
//   V     = m*V + eta*delta
//   size += round(V), clamped; eta *= gamma; window cleared.
void adapt_sample_size(EstimatorState &state, double observed_q_error,
                       std::int64_t row_count);

// Appends one Q-error observation; fires adapt_sample_size with the window
// mean every update_cadence feedbacks. Returns true when an update fired.
bool record_feedback(EstimatorState &state, std::int64_t estimated,
                     std::int64_t true_card, std::int64_t row_count);

// Uniform sample without replacement; value = round(rows * hit_fraction).
// A sample size >= row_count degenerates to an exact scan.
CardinalityEstimate estimate_by_sampling(
    const storage::Relation &relation, const std::string &column,
    const plan::VectorRangePredicate &predicate, EstimatorState &state,
    std::uint64_t rng_seed, bool adaptive);

enum class EstimatorKind {
  HeuristicPgvector,
  HeuristicVbase,
  HeuristicDuckdb,
  Ecqo,
  SamplingFixed,
  SamplingAdaptive,
};

EstimatorKind parse_estimator_kind(const std::string &name);
const char *estimator_kind_name(EstimatorKind kind);

// Planner-facing estimation interface (tests may inject stubs).
class VectorCardinalityEstimator {
 public:
  virtual ~VectorCardinalityEstimator() = default;
  virtual CardinalityEstimate estimate(
      const Catalog &catalog, const plan::VectorRangePredicate &pred) = 0;
  virtual void feedback(const Catalog &catalog,
                        const plan::VectorRangePredicate &pred,
                        std::int64_t estimated, std::int64_t true_card) {
    (void)catalog, (void)pred, (void)estimated, (void)true_card;
  }
};

// The pluggable framework: heuristics, ECQO with a persistent probe cache
// (one search per (query vector, threshold, index version)), and
// fixed/adaptive sampling with per-table state.
class EstimatorFramework : public VectorCardinalityEstimator {
 public:
  EstimatorFramework(EstimatorKind kind, SamplingParams sampling,
                     AdaptiveHyperparams hyper, std::uint64_t seed);

  CardinalityEstimate estimate(const Catalog &catalog,
                               const plan::VectorRangePredicate &pred) override;
  void feedback(const Catalog &catalog, const plan::VectorRangePredicate &pred,
                std::int64_t estimated, std::int64_t true_card) override;

  EstimatorKind kind() const { return kind_; }

  const EstimatorState *state(const std::string &table,
                              const std::string &column) const;
  EstimatorState &state_for(const Catalog &catalog, const std::string &table,
                            const std::string &column);
  nlohmann::json states_json() const;

  double last_planning_cost_ms() const { return last_planning_cost_ms_; }

 private:
  std::uint64_t predicate_key(const plan::VectorRangePredicate &pred,
                              std::uint64_t index_fingerprint) const;

  EstimatorKind kind_;
  SamplingParams sampling_;
  AdaptiveHyperparams hyper_;
  std::uint64_t seed_;
  std::map<std::pair<std::string, std::string>, EstimatorState> states_;
  std::unordered_map<std::uint64_t, CardinalityEstimate> probe_cache_;
  double last_planning_cost_ms_ = 0.0;
};

}  // namespace vaq::card
