#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "vaq/benchgen.hpp"
#include "vaq/engine_config.hpp"
#include "vaq/hnsw_io.hpp"
#include "vaq/report.hpp"
#include "vaq/workload.hpp"

namespace vaq::cli {

namespace fs = std::filesystem;

namespace {

struct GenArgs {
  double sf = 0.01;
  std::string dist = "gaussian-clustered";
  std::uint32_t dim = 96;
  std::uint64_t seed = 42;
  std::uint32_t clusters = 8;
  std::string out;
};

int cmd_gen(const GenArgs &a) {
  bench::BenchmarkSpec spec;
  spec.scale_factor = a.sf;
  spec.vector_dim = a.dim;
  spec.distribution = bench::parse_distribution(a.dist);
  spec.seed = a.seed;
  spec.cluster_count = a.clusters;
  spec.validate();

  auto catalog = bench::generate(spec);
  save_catalog(catalog, a.out);

  std::ifstream in(fs::path(a.out) / "manifest.json");
  nlohmann::json manifest;
  in >> manifest;
  std::cout << "catalog written to " << a.out << " ("
            << manifest.at("tables").size() << " tables, manifest "
            << manifest.at("manifest_hash").get<std::string>() << ")\n";
  for (const auto &t : manifest.at("tables"))
    std::cout << "  " << t.at("name").get<std::string>() << ": "
              << t.at("rows").get<std::size_t>() << " rows\n";
  return 0;
}

struct IndexArgs {
  std::string catalog_dir;
  std::string table;
  std::string column;
  std::uint32_t m = 16;
  std::uint32_t efc = 200;
  std::uint32_t efs = 400;
  std::uint64_t seed = 42;
};

int cmd_index(const IndexArgs &a) {
  auto catalog = load_catalog(a.catalog_dir);
  vindex::HnswParams params{a.m, a.efc, a.efs, a.seed};
  params.validate();

  std::vector<std::pair<std::string, std::string>> targets;
  for (const auto &name : catalog.relation_names()) {
    if (!a.table.empty() && name != a.table) continue;
    for (const auto &col : catalog.relation(name).columns()) {
      if (col.type().kind != storage::ColumnKind::Vector) continue;
      if (!a.column.empty() && col.name() != a.column) continue;
      targets.emplace_back(name, col.name());
    }
  }
  if (targets.empty())
    throw UsageError("no vector columns matched --table/--column");

  for (const auto &[table, column] : targets) {
    auto index = vindex::build_index(catalog.relation(table), column, params);
    const auto path = fs::path(a.catalog_dir) / index_file_name(table, column);
    vindex::save_index(index, path.string());
    std::cout << "built " << path.filename().string() << " (" << index.size()
              << " nodes, max level " << index.max_level() << ")\n";
  }
  return 0;
}

struct RunArgs {
  std::string catalog_dir;
  std::string templates = "q3";
  std::string estimator = "heuristic:pgvector";
  int queries = 1;
  int repetitions = 3;
  std::string target = "k:200";
  std::string calibration = "per-query";
  std::uint64_t seed = 42;
  std::string out_json = "report.json";
  std::string out_csv;
  std::string cost_profile = "default";
  // estimator knobs, defaults per the published configuration
  double z = 1.96, p_hat = 0.5, margin = 0.05;
  double momentum = 0.9, eta0 = 0.1, alpha = 50.0, beta = 1.5, gamma = 0.99;
  int cadence = 50;
  std::uint32_t m = 16, efc = 200, efs = 400;
};

std::vector<std::string> split_csv_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_run(const RunArgs &a) {
  auto catalog = load_catalog(a.catalog_dir);

  EngineConfig config;
  config.estimator = card::parse_estimator_kind(a.estimator);
  config.hnsw = {a.m, a.efc, a.efs, a.seed};
  config.sampling = {a.z, a.p_hat, a.margin};
  config.adaptive = {a.momentum, a.eta0, a.alpha, a.beta, a.gamma, a.cadence};
  config.cost_profile = a.cost_profile;
  config.seed = a.seed;

  bench::WorkloadOptions options;
  options.templates = split_csv_list(a.templates);
  if (options.templates.empty()) throw UsageError("no templates given");
  for (const auto &t : options.templates) bench::template_by_name(t);
  options.queries_per_template = a.queries;
  options.repetitions = a.repetitions;
  options.target = bench::Target::parse(a.target);
  if (a.calibration == "per-query")
    options.calibration = bench::WorkloadOptions::Calibration::PerQuery;
  else if (a.calibration == "per-template")
    options.calibration = bench::WorkloadOptions::Calibration::PerTemplate;
  else
    throw UsageError("--calibration must be per-query or per-template");
  options.seed = a.seed;

  // ECQO requires prebuilt indexes; fail loudly instead of building here.
  if (config.estimator == card::EstimatorKind::Ecqo) {
    for (const auto &tname : options.templates) {
      for (const auto &slot : bench::template_by_name(tname).vector_slots) {
        if (!try_load_index(catalog, a.catalog_dir, slot.relation, slot.column))
          throw DataError("ECQO needs an index for " + slot.relation + "." +
                          slot.column + "; run `vaq index --catalog " +
                          a.catalog_dir + "` first");
      }
    }
  }

  const auto report = bench::run_workload(catalog, options, {config});
  bench::save_report(report, a.out_json);
  if (!a.out_csv.empty()) bench::write_report_csv(report, a.out_csv);

  for (const auto &s : report.summaries)
    std::cout << s.template_name << " [" << s.config_name
              << "]: latency " << s.latency_ms << " ms (planning "
              << s.planning_ms << " ms), median q-error " << s.median_q_error
              << ", plan " << s.plan_hash << "\n";
  std::cout << "report written to " << a.out_json << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string> &files,
                const std::string &out_json) {
  if (files.size() < 2)
    throw UsageError("compare needs at least two report files");
  const auto base = bench::load_report(files[0]);
  nlohmann::json all = nlohmann::json::array();
  for (std::size_t i = 1; i < files.size(); ++i) {
    const auto cand = bench::load_report(files[i]);
    auto cmp = bench::compare_reports(base, cand);
    cmp["baseline_file"] = files[0];
    cmp["candidate_file"] = files[i];
    for (const auto &t : cmp.at("templates")) {
      std::cout << t.at("template").get<std::string>() << ": speedup "
                << t.at("speedup").get<double>();
      if (t.contains("plan_diff")) {
        const auto &d = t.at("plan_diff");
        std::cout << " [";
        if (d.at("join_order").get<bool>()) std::cout << " join-order";
        if (d.at("join_method").get<bool>()) std::cout << " join-method";
        if (d.at("scan_method").get<bool>()) std::cout << " scan-method";
        std::cout << " ]";
      }
      std::cout << "\n";
    }
    all.push_back(std::move(cmp));
  }
  if (!out_json.empty()) {
    std::ofstream out(out_json, std::ios::trunc);
    out << all.dump(2) << "\n";
  }
  return 0;
}

int cmd_trace_sampler(const std::string &report_file, const std::string &out) {
  const auto report = bench::load_report(report_file);
  bench::write_sampler_trace_csv(report, out);
  std::cout << "trace written to " << out << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string> &args) {
  CLI::App app{"vaq: vector-augmented analytical query engine workbench"};
  app.require_subcommand(1);

  GenArgs gen;
  auto *sub_gen = app.add_subcommand("gen", "generate a benchmark catalog");
  sub_gen->add_option("--sf", gen.sf, "scale factor (SF 0.01 = 8k partsupp rows)")
      ->envname("VAQ_SF");
  sub_gen->add_option("--dist", gen.dist, "vector distribution")
      ->envname("VAQ_DIST");
  sub_gen->add_option("--dim", gen.dim, "embedding dimension")->envname("VAQ_DIM");
  sub_gen->add_option("--seed", gen.seed, "generator seed")->envname("VAQ_SEED");
  sub_gen->add_option("--clusters", gen.clusters, "cluster count")
      ->envname("VAQ_CLUSTERS");
  sub_gen->add_option("-o,--out", gen.out, "output directory")
      ->required()
      ->envname("VAQ_OUT");

  IndexArgs index;
  auto *sub_index = app.add_subcommand("index", "build HNSW index files");
  sub_index->add_option("--catalog", index.catalog_dir, "catalog directory")
      ->required()
      ->envname("VAQ_CATALOG");
  sub_index->add_option("--table", index.table, "restrict to one table")
      ->envname("VAQ_TABLE");
  sub_index->add_option("--column", index.column, "restrict to one column")
      ->envname("VAQ_COLUMN");
  sub_index->add_option("--m", index.m, "HNSW M")->envname("VAQ_M");
  sub_index->add_option("--ef-construction", index.efc, "build beam width")
      ->envname("VAQ_EF_CONSTRUCTION");
  sub_index->add_option("--ef-search", index.efs, "query beam width")
      ->envname("VAQ_EF_SEARCH");
  sub_index->add_option("--seed", index.seed, "level-assignment seed")
      ->envname("VAQ_SEED");

  RunArgs run;
  auto *sub_run = app.add_subcommand("run", "run a workload and write reports");
  sub_run->add_option("--catalog", run.catalog_dir, "catalog directory")
      ->required()
      ->envname("VAQ_CATALOG");
  sub_run->add_option("--templates", run.templates, "comma-separated template ids")
      ->envname("VAQ_TEMPLATES");
  sub_run->add_option("--estimator", run.estimator, "cardinality estimator")
      ->envname("VAQ_ESTIMATOR");
  sub_run->add_option("--queries", run.queries, "query instances per template")
      ->envname("VAQ_QUERIES");
  sub_run->add_option("--repetitions", run.repetitions,
                      "timing repetitions per query")
      ->envname("VAQ_REPETITIONS");
  sub_run->add_option("--target", run.target, "k:<count> or frac:<fraction>")
      ->envname("VAQ_TARGET");
  sub_run->add_option("--calibration", run.calibration,
                      "per-query or per-template threshold calibration")
      ->envname("VAQ_CALIBRATION");
  sub_run->add_option("--seed", run.seed, "workload seed")->envname("VAQ_SEED");
  sub_run->add_option("-o,--out", run.out_json, "report JSON path")
      ->envname("VAQ_OUT");
  sub_run->add_option("--csv", run.out_csv, "also write a CSV report")
      ->envname("VAQ_CSV");
  sub_run->add_option("--cost-profile", run.cost_profile, "cost model profile")
      ->envname("VAQ_COST_PROFILE");
  sub_run->add_option("--z", run.z, "sampling critical value")->envname("VAQ_Z");
  sub_run->add_option("--p-hat", run.p_hat, "sampling proportion estimate")
      ->envname("VAQ_P_HAT");
  sub_run->add_option("--margin", run.margin, "sampling margin of error")
      ->envname("VAQ_MARGIN");
  sub_run->add_option("--momentum", run.momentum, "adaptive momentum m")
      ->envname("VAQ_MOMENTUM");
  sub_run->add_option("--eta0", run.eta0, "initial learning rate")
      ->envname("VAQ_ETA0");
  sub_run->add_option("--alpha", run.alpha, "Q-error weighting factor")
      ->envname("VAQ_ALPHA");
  sub_run->add_option("--beta", run.beta, "target Q-error")->envname("VAQ_BETA");
  sub_run->add_option("--gamma", run.gamma, "learning rate decay")
      ->envname("VAQ_GAMMA");
  sub_run->add_option("--cadence", run.cadence, "queries per size update")
      ->envname("VAQ_CADENCE");
  sub_run->add_option("--m", run.m, "HNSW M")->envname("VAQ_M");
  sub_run->add_option("--ef-construction", run.efc, "HNSW build beam")
      ->envname("VAQ_EF_CONSTRUCTION");
  sub_run->add_option("--ef-search", run.efs, "HNSW query beam")
      ->envname("VAQ_EF_SEARCH");

  std::vector<std::string> compare_files;
  std::string compare_out;
  auto *sub_compare =
      app.add_subcommand("compare", "diff two or more workload reports");
  sub_compare->add_option("reports", compare_files, "baseline then candidates")
      ->expected(-2);
  sub_compare->add_option("-o,--out", compare_out, "comparison JSON path")
      ->envname("VAQ_OUT");

  std::string trace_report, trace_out = "sampler_trace.csv";
  auto *sub_trace = app.add_subcommand(
      "trace-sampler", "dump the adaptive sampler trajectory as CSV");
  sub_trace->add_option("report", trace_report, "report JSON from a run")
      ->required();
  sub_trace->add_option("-o,--out", trace_out, "trace CSV path")
      ->envname("VAQ_OUT");

  std::vector<const char *> argv;
  argv.push_back("vaq");
  for (const auto &a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()),
              const_cast<char **>(argv.data()));
  } catch (const CLI::CallForHelp &e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (sub_gen->parsed()) return cmd_gen(gen);
    if (sub_index->parsed()) return cmd_index(index);
    if (sub_run->parsed()) return cmd_run(run);
    if (sub_compare->parsed()) return cmd_compare(compare_files, compare_out);
    if (sub_trace->parsed()) return cmd_trace_sampler(trace_report, trace_out);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace vaq::cli
