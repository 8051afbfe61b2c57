#include "vaq/workload.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "vaq/executor.hpp"
#include "vaq/planner.hpp"
#include "vaq/rng.hpp"

namespace vaq::bench {

double trimmed_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 2)
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const double sum =
      std::accumulate(values.begin() + 1, values.end() - 1, 0.0);
  return sum / static_cast<double>(values.size() - 2);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

nlohmann::json WorkloadOptions::to_json() const {
  return nlohmann::json{
      {"templates", templates},
      {"queries_per_template", queries_per_template},
      {"repetitions", repetitions},
      {"target", target.str()},
      {"calibration",
       calibration == Calibration::PerQuery ? "per-query" : "per-template"},
      {"seed", seed}};
}

namespace {

QueryRecord make_record(const std::string &template_name,
                        const std::string &config_name, int query_index) {
  QueryRecord r;
  r.template_name = template_name;
  r.config_name = config_name;
  r.query_index = query_index;
  return r;
}

nlohmann::json record_json(const QueryRecord &r) {
  return nlohmann::json{{"template", r.template_name},
                        {"config", r.config_name},
                        {"query", r.query_index},
                        {"latency_ms", r.latency_ms},
                        {"planning_ms", r.planning_ms},
                        {"execution_ms", r.execution_ms},
                        {"estimation_ms", r.estimation_ms},
                        {"est_card", r.est_card},
                        {"true_card", r.true_card},
                        {"observed_card", r.observed_card},
                        {"q_error", r.q_error},
                        {"sample_size", r.sample_size},
                        {"learning_rate", r.learning_rate},
                        {"plan_hash", r.plan_hash},
                        {"ann_probe_count", r.ann_probe_count},
                        {"result_rows", r.result_rows}};
}

QueryRecord record_from_json(const nlohmann::json &j) {
  QueryRecord r;
  r.template_name = j.at("template").get<std::string>();
  r.config_name = j.at("config").get<std::string>();
  r.query_index = j.at("query").get<int>();
  r.latency_ms = j.at("latency_ms").get<double>();
  r.planning_ms = j.at("planning_ms").get<double>();
  r.execution_ms = j.at("execution_ms").get<double>();
  r.estimation_ms = j.at("estimation_ms").get<double>();
  r.est_card = j.at("est_card").get<std::int64_t>();
  r.true_card = j.at("true_card").get<std::int64_t>();
  r.observed_card = j.at("observed_card").get<std::int64_t>();
  r.q_error = j.at("q_error").get<double>();
  r.sample_size = j.at("sample_size").get<std::int64_t>();
  r.learning_rate = j.at("learning_rate").get<double>();
  r.plan_hash = j.at("plan_hash").get<std::string>();
  r.ann_probe_count = j.at("ann_probe_count").get<std::int64_t>();
  r.result_rows = j.at("result_rows").get<std::int64_t>();
  return r;
}

}  // namespace

nlohmann::json WorkloadReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["tool_version"] = kToolVersion;
  j["manifest_hash"] = hex64(manifest_hash);
  j["options"] = options.to_json();
  j["configs"] = configs;
  j["records"] = nlohmann::json::array();
  for (const auto &r : records) j["records"].push_back(record_json(r));
  j["summaries"] = nlohmann::json::array();
  for (const auto &s : summaries) {
    j["summaries"].push_back(nlohmann::json{
        {"template", s.template_name},
        {"config", s.config_name},
        {"latency_ms", s.latency_ms},
        {"planning_ms", s.planning_ms},
        {"execution_ms", s.execution_ms},
        {"median_q_error", s.median_q_error},
        {"plan_hash", s.plan_hash},
        {"distinct_plans", s.distinct_plans}});
  }
  j["plans"] = plans;
  j["estimator_states"] = estimator_states;
  return j;
}

WorkloadReport WorkloadReport::from_json(const nlohmann::json &j) {
  WorkloadReport rep;
  rep.manifest_hash =
      std::stoull(j.at("manifest_hash").get<std::string>(), nullptr, 16);
  const auto &opts = j.at("options");
  rep.options.templates = opts.at("templates").get<std::vector<std::string>>();
  rep.options.queries_per_template = opts.at("queries_per_template").get<int>();
  rep.options.repetitions = opts.at("repetitions").get<int>();
  rep.options.target = Target::parse(opts.at("target").get<std::string>());
  rep.options.calibration =
      opts.at("calibration").get<std::string>() == "per-template"
          ? WorkloadOptions::Calibration::PerTemplate
          : WorkloadOptions::Calibration::PerQuery;
  rep.options.seed = opts.at("seed").get<std::uint64_t>();
  rep.configs = j.at("configs").get<std::vector<nlohmann::json>>();
  for (const auto &r : j.at("records")) rep.records.push_back(record_from_json(r));
  for (const auto &s : j.at("summaries")) {
    TemplateSummary sum;
    sum.template_name = s.at("template").get<std::string>();
    sum.config_name = s.at("config").get<std::string>();
    sum.latency_ms = s.at("latency_ms").get<double>();
    sum.planning_ms = s.at("planning_ms").get<double>();
    sum.execution_ms = s.at("execution_ms").get<double>();
    sum.median_q_error = s.at("median_q_error").get<double>();
    sum.plan_hash = s.at("plan_hash").get<std::string>();
    sum.distinct_plans = s.at("distinct_plans").get<int>();
    rep.summaries.push_back(std::move(sum));
  }
  rep.plans = j.value("plans", nlohmann::json::object());
  rep.estimator_states = j.value("estimator_states", nlohmann::json::object());
  return rep;
}

const TemplateSummary &WorkloadReport::summary(
    const std::string &template_name, const std::string &config_name) const {
  for (const auto &s : summaries)
    if (s.template_name == template_name && s.config_name == config_name)
      return s;
  throw DataError("report has no summary for " + template_name + "/" +
                  config_name);
}

WorkloadReport run_workload(const Catalog &catalog,
                            const WorkloadOptions &options,
                            const std::vector<EngineConfig> &configs) {
  if (options.templates.empty())
    throw UsageError("no templates requested");
  if (configs.empty()) throw UsageError("no estimator configs given");
  if (options.queries_per_template < 1 || options.repetitions < 1)
    throw UsageError("queries and repetitions must be >= 1");

  WorkloadReport report;
  report.manifest_hash = catalog.manifest_hash();
  report.options = options;
  report.plans = nlohmann::json::object();
  report.estimator_states = nlohmann::json::object();

  for (const auto &config : configs) {
    report.configs.push_back(config.to_json());
    auto estimator = make_estimator(config);
    const auto cost = plan::cost_profile(config.cost_profile);

    for (const auto &template_name : options.templates) {
      const auto &tmpl = template_by_name(template_name);
      std::map<std::string, double> frozen;

      std::vector<double> latencies, planning_times, execution_times,
          q_errors;
      std::set<std::string> plan_hashes;
      std::string first_hash;

      for (int qi = 0; qi < options.queries_per_template; ++qi) {
        const auto inst_seed =
            mix_seed(mix_seed(options.seed, fnv1a(template_name)),
                     static_cast<std::uint64_t>(qi));
        const bool use_frozen =
            options.calibration == WorkloadOptions::Calibration::PerTemplate &&
            qi > 0;
        auto inst = instantiate(tmpl, catalog, inst_seed, options.target,
                                use_frozen ? &frozen : nullptr);
        if (options.calibration == WorkloadOptions::Calibration::PerTemplate &&
            qi == 0) {
          for (const auto &p : inst.predicates)
            frozen[plan::qualified(p.relation, p.column)] = p.threshold;
        }

        plan::Planner planner(catalog, cost, *estimator, config.name(),
                              config.cost_profile);
        auto plan = planner.plan(inst.logical);

        auto record = make_record(template_name, config.name(), qi);
        record.planning_ms = plan.planning_ms;
        record.estimation_ms = plan.estimation_ms;
        record.plan_hash = hex64(plan.plan_hash());

        const auto &primary = inst.predicates.front();
        record.true_card = primary.oracle_count;
        for (const auto &pe : plan.vector_estimates) {
          if (pe.predicate.relation == primary.relation &&
              pe.predicate.column == primary.column)
            record.est_card = pe.estimate.value;
        }
        record.q_error = card::q_error(record.est_card, record.true_card);
        if (const auto *st =
                estimator->state(primary.relation, primary.column)) {
          record.sample_size = st->sampling_size;
          record.learning_rate = st->learning_rate;
        }

        std::vector<double> exec_times;
        exec::ExecStats stats;
        for (int rep = 0; rep < options.repetitions; ++rep) {
          auto result = exec::execute(plan, catalog, stats,
                                      rep == 0 ? estimator.get() : nullptr);
          exec_times.push_back(stats.total_ms);
          record.result_rows = static_cast<std::int64_t>(result.rows);
        }
        record.execution_ms = trimmed_mean(exec_times);
        record.latency_ms = record.planning_ms + record.execution_ms;
        record.ann_probe_count = stats.ann_probe_count;
        record.observed_card = stats.vector_observed.count(
                                   plan::qualified(primary.relation,
                                                   primary.column))
                                   ? stats.vector_observed.at(plan::qualified(
                                         primary.relation, primary.column))
                                   : 0;

        latencies.push_back(record.latency_ms);
        planning_times.push_back(record.planning_ms);
        execution_times.push_back(record.execution_ms);
        q_errors.push_back(record.q_error);
        plan_hashes.insert(record.plan_hash);
        if (qi == 0) {
          first_hash = record.plan_hash;
          report.plans[config.name() + "/" + template_name] =
              plan.explain_json();
        }
        report.records.push_back(std::move(record));
      }

      TemplateSummary sum;
      sum.template_name = template_name;
      sum.config_name = config.name();
      sum.latency_ms = trimmed_mean(latencies);
      sum.planning_ms = trimmed_mean(planning_times);
      sum.execution_ms = trimmed_mean(execution_times);
      sum.median_q_error = median(q_errors);
      sum.plan_hash = first_hash;
      sum.distinct_plans = static_cast<int>(plan_hashes.size());
      report.summaries.push_back(std::move(sum));
    }
    report.estimator_states[config.name()] = estimator->states_json();
  }
  return report;
}

}  // namespace vaq::bench
