#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vaq/catalog.hpp"
#include "vaq/engine_config.hpp"
#include "vaq/templates.hpp"

namespace vaq::bench {

struct WorkloadOptions {
  std::vector<std::string> templates;
  int queries_per_template = 1;
  int repetitions = 3;
  Target target = Target::match_count(200);
  // PerQuery calibrates every instance to the target; PerTemplate freezes
  // the threshold from the first instance (workload difficulty then tracks
  // local density).
  enum class Calibration { PerQuery, PerTemplate };
  Calibration calibration = Calibration::PerQuery;
  std::uint64_t seed = 42;

  nlohmann::json to_json() const;
};

struct QueryRecord {
  std::string template_name;
  std::string config_name;
  int query_index = 0;
  double latency_ms = 0.0;    // planning + trimmed-mean execution
  double planning_ms = 0.0;
  double execution_ms = 0.0;  // trimmed mean over repetitions
  double estimation_ms = 0.0;
  std::int64_t est_card = 0;
  std::int64_t true_card = 0;      // brute-force oracle
  std::int64_t observed_card = 0;  // vector node's observed rows
  double q_error = 1.0;
  std::int64_t sample_size = 0;
  double learning_rate = 0.0;
  std::string plan_hash;
  std::int64_t ann_probe_count = 0;
  std::int64_t result_rows = 0;
};

struct TemplateSummary {
  std::string template_name;
  std::string config_name;
  double latency_ms = 0.0;  // trimmed mean over query instances
  double planning_ms = 0.0;
  double execution_ms = 0.0;
  double median_q_error = 1.0;
  std::string plan_hash;
  int distinct_plans = 1;
};

struct WorkloadReport {
  std::uint64_t manifest_hash = 0;
  WorkloadOptions options;
  std::vector<nlohmann::json> configs;
  std::vector<QueryRecord> records;
  std::vector<TemplateSummary> summaries;
  nlohmann::json plans;  // "<config>/<template>" -> explain json
  nlohmann::json estimator_states;

  nlohmann::json to_json() const;
  static WorkloadReport from_json(const nlohmann::json &j);

  const TemplateSummary &summary(const std::string &template_name,
                                 const std::string &config_name) const;
};

double trimmed_mean(std::vector<double> values);
double median(std::vector<double> values);

WorkloadReport run_workload(const Catalog &catalog,
                            const WorkloadOptions &options,
                            const std::vector<EngineConfig> &configs);

}  // namespace vaq::bench
