#include "vaq/engine_config.hpp"

namespace vaq {

nlohmann::json EngineConfig::to_json() const {
  return nlohmann::json{
      {"estimator", name()},
      {"hnsw",
       {{"m", hnsw.m},
        {"ef_construction", hnsw.ef_construction},
        {"ef_search", hnsw.ef_search},
        {"seed", hnsw.seed}}},
      {"sampling", {{"z", sampling.z}, {"p_hat", sampling.p_hat}, {"e", sampling.e}}},
      {"adaptive",
       {{"momentum", adaptive.momentum_coeff},
        {"eta0", adaptive.eta0},
        {"alpha", adaptive.alpha},
        {"beta", adaptive.beta},
        {"gamma", adaptive.gamma},
        {"cadence", adaptive.update_cadence}}},
      {"cost_profile", cost_profile},
      {"seed", seed}};
}

std::unique_ptr<card::EstimatorFramework> make_estimator(
    const EngineConfig &config) {
  return std::make_unique<card::EstimatorFramework>(
      config.estimator, config.sampling, config.adaptive, config.seed);
}

}  // namespace vaq
