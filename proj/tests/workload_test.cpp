#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "support/test_data.hpp"
#include "vaq/report.hpp"
#include "vaq/workload.hpp"

using namespace vaq;
using namespace vaq::bench;

namespace {

const Catalog &indexed_small_catalog() {
  static const Catalog catalog = [] {
    BenchmarkSpec spec;
    spec.scale_factor = 0.001;
    spec.vector_dim = 16;
    spec.seed = 7;
    auto cat = generate(spec);
    cat.add_index(std::make_shared<vindex::HnswIndex>(vindex::build_index(
        cat.relation("partsupp"), "ps_image_embedding", {16, 100, 200, 7})));
    return cat;
  }();
  return catalog;
}

EngineConfig config_of(card::EstimatorKind kind) {
  EngineConfig c;
  c.estimator = kind;
  return c;
}

}  // namespace

TEST_CASE("trimmed mean and median") {
  CHECK(trimmed_mean({5.0}) == 5.0);
  CHECK(trimmed_mean({1.0, 100.0}) == doctest::Approx(50.5));
  // three repetitions: trimming min and max leaves the median
  CHECK(trimmed_mean({7.0, 1.0, 100.0}) == 7.0);
  CHECK(trimmed_mean({1.0, 2.0, 3.0, 100.0}) == doctest::Approx(2.5));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(2.5));
}

TEST_CASE("workload produces records, summaries and plans") {
  const auto &catalog = testsupport::small_catalog();
  WorkloadOptions options;
  options.templates = {"q3", "q11"};
  options.queries_per_template = 2;
  options.repetitions = 3;
  options.target = Target::fraction(0.02);
  options.seed = 5;

  auto report = run_workload(catalog, options,
                             {config_of(card::EstimatorKind::HeuristicPgvector)});
  CHECK(report.records.size() == 4);
  CHECK(report.summaries.size() == 2);
  CHECK(report.manifest_hash == catalog.manifest_hash());
  for (const auto &r : report.records) {
    CHECK(r.latency_ms > 0.0);
    CHECK(r.true_card > 0);
    CHECK(r.est_card > 0);
    CHECK(!r.plan_hash.empty());
    CHECK(r.q_error >= 1.0);
  }
  CHECK(report.plans.contains("heuristic:pgvector/q3"));
  const auto &sum = report.summary("q3", "heuristic:pgvector");
  CHECK(sum.latency_ms > 0.0);
}

TEST_CASE("workload q-error sequences are deterministic") {
  const auto &catalog = testsupport::small_catalog();
  WorkloadOptions options;
  options.templates = {"q3"};
  options.queries_per_template = 5;
  options.repetitions = 1;
  options.target = Target::fraction(0.02);
  options.seed = 11;

  auto a = run_workload(catalog, options,
                        {config_of(card::EstimatorKind::SamplingFixed)});
  auto b = run_workload(catalog, options,
                        {config_of(card::EstimatorKind::SamplingFixed)});
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].q_error == b.records[i].q_error);
    CHECK(a.records[i].est_card == b.records[i].est_card);
    CHECK(a.records[i].true_card == b.records[i].true_card);
    CHECK(a.records[i].plan_hash == b.records[i].plan_hash);
  }
}

TEST_CASE("ECQO workload reuses every probe during execution") {
  const auto &catalog = indexed_small_catalog();
  WorkloadOptions options;
  options.templates = {"q3"};
  options.queries_per_template = 3;
  options.repetitions = 2;
  options.target = Target::match_count(20);
  options.seed = 3;

  auto report =
      run_workload(catalog, options, {config_of(card::EstimatorKind::Ecqo)});
  for (const auto &r : report.records) {
    CHECK(r.ann_probe_count == 0);
    CHECK(r.est_card <= r.true_card);  // probe never exceeds the oracle
  }
}

TEST_CASE("report JSON round-trips") {
  const auto &catalog = testsupport::small_catalog();
  WorkloadOptions options;
  options.templates = {"q11"};
  options.queries_per_template = 2;
  options.repetitions = 1;
  options.target = Target::fraction(0.05);

  auto report = run_workload(catalog, options,
                             {config_of(card::EstimatorKind::HeuristicVbase)});
  const auto path =
      (std::filesystem::temp_directory_path() / "vaq_report_rt.json").string();
  save_report(report, path);
  auto loaded = load_report(path);
  CHECK(loaded.manifest_hash == report.manifest_hash);
  REQUIRE(loaded.records.size() == report.records.size());
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    CHECK(loaded.records[i].q_error == report.records[i].q_error);
    CHECK(loaded.records[i].plan_hash == report.records[i].plan_hash);
    CHECK(loaded.records[i].latency_ms == report.records[i].latency_ms);
  }
  CHECK(loaded.summaries.size() == report.summaries.size());

  const auto csv_path =
      (std::filesystem::temp_directory_path() / "vaq_report_rt.csv").string();
  write_report_csv(report, csv_path);
  std::ifstream csv(csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "template,config,latency_ms,est_card,true_card,q_error,sample_size,"
        "plan_hash");
}

TEST_CASE("comparing a report with itself gives speedup 1.0") {
  const auto &catalog = testsupport::small_catalog();
  WorkloadOptions options;
  options.templates = {"q3"};
  options.queries_per_template = 2;
  options.repetitions = 1;
  options.target = Target::fraction(0.02);

  auto report = run_workload(catalog, options,
                             {config_of(card::EstimatorKind::HeuristicVbase)});
  auto cmp = compare_reports(report, report);
  for (const auto &t : cmp.at("templates")) {
    CHECK(t.at("speedup").get<double>() == doctest::Approx(1.0));
    CHECK(!t.at("plan_changed").get<bool>());
  }
}

TEST_CASE("comparing reports from different catalogs fails") {
  const auto &a = testsupport::small_catalog();
  BenchmarkSpec spec;
  spec.scale_factor = 0.001;
  spec.vector_dim = 16;
  spec.seed = 99;  // different catalog
  auto b_catalog = generate(spec);

  WorkloadOptions options;
  options.templates = {"q11"};
  options.queries_per_template = 1;
  options.repetitions = 1;
  options.target = Target::fraction(0.05);

  auto ra = run_workload(a, options,
                         {config_of(card::EstimatorKind::HeuristicVbase)});
  auto rb = run_workload(b_catalog, options,
                         {config_of(card::EstimatorKind::HeuristicVbase)});
  CHECK_THROWS_AS(compare_reports(ra, rb), DataError);
}

TEST_CASE("adaptive sample size changes only at cadence boundaries") {
  const auto &catalog = testsupport::small_catalog();
  WorkloadOptions options;
  options.templates = {"q3"};
  options.queries_per_template = 49;
  options.repetitions = 1;
  options.target = Target::fraction(0.02);
  options.seed = 21;

  auto short_run = run_workload(
      catalog, options, {config_of(card::EstimatorKind::SamplingAdaptive)});
  std::set<std::int64_t> sizes;
  for (const auto &r : short_run.records) sizes.insert(r.sample_size);
  CHECK(sizes.size() == 1);  // cadence 50 never fired in 49 queries

  options.queries_per_template = 120;
  auto long_run = run_workload(
      catalog, options, {config_of(card::EstimatorKind::SamplingAdaptive)});
  std::set<std::int64_t> long_sizes;
  std::int64_t prev = long_run.records.front().sample_size;
  for (const auto &r : long_run.records) {
    if (r.sample_size != prev) {
      // changes may only appear right after queries 50 and 100
      CHECK((r.query_index == 50 || r.query_index == 100));
      prev = r.sample_size;
    }
    long_sizes.insert(r.sample_size);
  }
  CHECK(long_sizes.size() <= 3);

  // sampler trace CSV
  const auto trace_path =
      (std::filesystem::temp_directory_path() / "vaq_trace.csv").string();
  write_sampler_trace_csv(long_run, trace_path);
  std::ifstream trace(trace_path);
  std::string line;
  std::getline(trace, line);
  CHECK(line == "query_index,sample_size,q_error,learning_rate");
  int rows = 0;
  while (std::getline(trace, line)) ++rows;
  CHECK(rows == 120);

  // trace requires an adaptive report
  WorkloadOptions opt2 = options;
  opt2.queries_per_template = 1;
  auto fixed_run = run_workload(catalog, opt2,
                                {config_of(card::EstimatorKind::SamplingFixed)});
  CHECK_THROWS_AS(write_sampler_trace_csv(fixed_run, trace_path), DataError);
}

TEST_CASE("multi-config workload carries both configs in one report") {
  const auto &catalog = indexed_small_catalog();
  WorkloadOptions options;
  options.templates = {"q3"};
  options.queries_per_template = 2;
  options.repetitions = 1;
  options.target = Target::match_count(15);

  auto report = run_workload(catalog, options,
                             {config_of(card::EstimatorKind::HeuristicDuckdb),
                              config_of(card::EstimatorKind::Ecqo)});
  CHECK(report.configs.size() == 2);
  CHECK(report.summaries.size() == 2);
  CHECK(report.plans.contains("heuristic:duckdb/q3"));
  CHECK(report.plans.contains("ecqo/q3"));

  const auto diff = diff_plans(report.plans.at("heuristic:duckdb/q3"),
                               report.plans.at("ecqo/q3"));
  CHECK(diff.scan_method_changed);
}
