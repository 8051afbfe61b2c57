#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "vaq/cardinality.hpp"
#include "vaq/cost_model.hpp"
#include "vaq/hnsw.hpp"

namespace vaq {

// One engine configuration: estimator choice plus the knobs behind it.
// Defaults are the published setup: HNSW (M=16, ef_construction=200,
// ef_search=400), sampling (z=1.96, p_hat=0.5, e=0.05 -> N=385), adaptive
// (m=0.9, eta0=0.1, alpha=50, beta=1.5, gamma=0.99, cadence 50).
struct EngineConfig {
  card::EstimatorKind estimator = card::EstimatorKind::HeuristicPgvector;
  vindex::HnswParams hnsw;
  card::SamplingParams sampling;
  card::AdaptiveHyperparams adaptive;
  std::string cost_profile = "default";
  std::uint64_t seed = 42;

  std::string name() const { return card::estimator_kind_name(estimator); }
  nlohmann::json to_json() const;
};

std::unique_ptr<card::EstimatorFramework> make_estimator(
    const EngineConfig &config);

}  // namespace vaq
