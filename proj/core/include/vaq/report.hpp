#pragma once

#include <string>

#include "json.hpp"
#include "vaq/workload.hpp"

namespace vaq::bench {

void save_report(const WorkloadReport &report, const std::string &json_path);
WorkloadReport load_report(const std::string &json_path);

// One CSV row per query execution: template, config, latency_ms, est_card,
// true_card, q_error, sample_size, plan_hash.
void write_report_csv(const WorkloadReport &report, const std::string &path);

// Plan-shape differences between two explain trees.
struct PlanDiff {
  bool join_order_changed = false;
  bool join_method_changed = false;
  bool scan_method_changed = false;
  std::vector<std::string> details;
};

PlanDiff diff_plans(const nlohmann::json &base_plan,
                    const nlohmann::json &other_plan);

// Per-template speedups, Q-error summaries and plan-change classification
// between a baseline report and a candidate report. Both reports must come
// from the same catalog (manifest hash check) and share templates.
nlohmann::json compare_reports(const WorkloadReport &base,
                               const WorkloadReport &candidate);

// (query index, sample size, q_error, learning rate) rows from a
// sampling:adaptive run.
void write_sampler_trace_csv(const WorkloadReport &report,
                             const std::string &path);

}  // namespace vaq::bench
