#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "commands.hpp"
#include "json.hpp"
#include "vaq/report.hpp"

using vaq::cli::run_cli;
namespace fs = std::filesystem;

namespace {

// One CLI workspace per process run, built on demand.
struct Workspace {
  fs::path root;
  fs::path data;

  Workspace() {
    root = fs::temp_directory_path() / "vaq_cli_ws";
    fs::remove_all(root);
    fs::create_directories(root);
    data = root / "data";
  }

  std::string path(const std::string &name) const {
    return (root / name).string();
  }
};

Workspace &ws() {
  static Workspace w;
  return w;
}

nlohmann::json read_json(const std::string &path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

int gen_small(const std::string &dir, const std::string &seed = "42") {
  return run_cli({"gen", "--sf", "0.001", "--dim", "8", "--seed", seed,
                  "--dist", "gaussian-clustered", "-o", dir});
}

}  // namespace

TEST_CASE("gen writes a five-table catalog and is deterministic") {
  REQUIRE(gen_small(ws().data.string()) == 0);
  const auto manifest = read_json((ws().data / "manifest.json").string());
  CHECK(manifest.at("tables").size() == 5);
  const auto hash1 = manifest.at("manifest_hash").get<std::string>();

  const auto second = ws().path("data_again");
  REQUIRE(gen_small(second) == 0);
  const auto manifest2 = read_json(second + "/manifest.json");
  CHECK(manifest2.at("manifest_hash").get<std::string>() == hash1);

  // the files themselves exist
  CHECK(fs::exists(ws().data / "partsupp.csv"));
  CHECK(fs::exists(ws().data / "partsupp.ps_image_embedding.fvecs"));
}

TEST_CASE("gen rejects a zero scale factor") {
  CHECK(run_cli({"gen", "--sf", "0", "-o", ws().path("bad")}) == 2);
}

TEST_CASE("run with ECQO and no index fails loudly") {
  const auto code =
      run_cli({"run", "--catalog", ws().data.string(), "--templates", "q3",
               "--estimator", "ecqo", "--target", "k:10", "-o",
               ws().path("never.json")});
  CHECK(code == 3);
}

TEST_CASE("unknown template id is a usage error") {
  CHECK(run_cli({"run", "--catalog", ws().data.string(), "--templates",
                 "q99", "-o", ws().path("x.json")}) == 2);
}

TEST_CASE("index then run ecqo: single probe per query") {
  REQUIRE(run_cli({"index", "--catalog", ws().data.string(), "--table",
                   "partsupp", "--ef-construction", "100"}) == 0);
  CHECK(fs::exists(ws().data / "partsupp.ps_image_embedding.hnsw"));
  CHECK(fs::exists(ws().data / "partsupp.ps_text_embedding.hnsw"));

  REQUIRE(run_cli({"run", "--catalog", ws().data.string(), "--templates",
                   "q3", "--estimator", "ecqo", "--target", "k:10",
                   "--queries", "2", "--repetitions", "2", "-o",
                   ws().path("ecqo.json"), "--csv", ws().path("ecqo.csv")}) ==
          0);
  const auto report = vaq::bench::load_report(ws().path("ecqo.json"));
  for (const auto &r : report.records) CHECK(r.ann_probe_count == 0);
  CHECK(fs::exists(ws().path("ecqo.csv")));
}

TEST_CASE("run with the duckdb heuristic estimates the full table") {
  REQUIRE(run_cli({"run", "--catalog", ws().data.string(), "--templates",
                   "q3", "--estimator", "heuristic:duckdb", "--target",
                   "k:10", "-o", ws().path("duck.json")}) == 0);
  const auto report = vaq::bench::load_report(ws().path("duck.json"));
  const auto rows = 800;  // partsupp at SF 0.001
  for (const auto &r : report.records) CHECK(r.est_card == rows);
}

TEST_CASE("compare: identity speedup and catalog mismatch") {
  REQUIRE(run_cli({"compare", ws().path("duck.json"), ws().path("duck.json"),
                   "-o", ws().path("cmp.json")}) == 0);
  const auto cmp = read_json(ws().path("cmp.json"));
  for (const auto &t : cmp.at(0).at("templates"))
    CHECK(t.at("speedup").get<double>() == doctest::Approx(1.0));

  // a report from a different catalog cannot be compared
  const auto other_dir = ws().path("other_data");
  REQUIRE(gen_small(other_dir, "77") == 0);
  REQUIRE(run_cli({"run", "--catalog", other_dir, "--templates", "q3",
                   "--estimator", "heuristic:duckdb", "--target", "k:10",
                   "-o", ws().path("other.json")}) == 0);
  CHECK(run_cli({"compare", ws().path("duck.json"), ws().path("other.json")}) ==
        3);
}

TEST_CASE("trace-sampler requires an adaptive report") {
  CHECK(run_cli({"trace-sampler", ws().path("duck.json"), "-o",
                 ws().path("trace.csv")}) == 3);

  REQUIRE(run_cli({"run", "--catalog", ws().data.string(), "--templates",
                   "q3", "--estimator", "sampling:adaptive", "--target",
                   "frac:0.02", "--queries", "3", "-o",
                   ws().path("adapt.json")}) == 0);
  CHECK(run_cli({"trace-sampler", ws().path("adapt.json"), "-o",
                 ws().path("trace.csv")}) == 0);
  std::ifstream trace(ws().path("trace.csv"));
  std::string header;
  std::getline(trace, header);
  CHECK(header == "query_index,sample_size,q_error,learning_rate");
}

TEST_CASE("missing subcommand and bad flags are usage errors") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"run", "--catalog", ws().data.string(), "--estimator",
                 "bogus", "-o", ws().path("y.json")}) == 2);
  CHECK(run_cli({"run", "--catalog", ws().path("missing_dir"), "--templates",
                 "q3", "-o", ws().path("z.json")}) == 3);
}
