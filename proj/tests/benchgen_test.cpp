#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "support/test_data.hpp"
#include "vaq/benchgen.hpp"
#include "vaq/calibrate.hpp"
#include "vaq/hnsw.hpp"
#include "vaq/templates.hpp"

using namespace vaq;
using namespace vaq::bench;

namespace {

// Tiny k-means for the clustering sanity oracle (test-only). Farthest-point
// initialization keeps well-separated clusters from collapsing.
double kmeans_inertia(const storage::Relation &rel, const std::string &col,
                      int k, int iters) {
  const auto &c = rel.column(col);
  const auto n = rel.row_count();
  const auto dim = c.type().dim;

  auto dist2 = [&](std::span<const float> v, const std::vector<double> &ctr) {
    double d2 = 0;
    for (std::uint32_t d = 0; d < dim; ++d) {
      const double diff = v[d] - ctr[d];
      d2 += diff * diff;
    }
    return d2;
  };

  std::vector<std::vector<double>> centers;
  {
    const auto v0 = c.vector_at(0);
    centers.push_back({v0.begin(), v0.end()});
    while (static_cast<int>(centers.size()) < k) {
      std::size_t far_row = 0;
      double far_d = -1;
      for (std::size_t r = 0; r < n; ++r) {
        double nearest = 1e300;
        for (const auto &ctr : centers)
          nearest = std::min(nearest, dist2(c.vector_at(r), ctr));
        if (nearest > far_d) {
          far_d = nearest;
          far_row = r;
        }
      }
      const auto v = c.vector_at(far_row);
      centers.push_back({v.begin(), v.end()});
    }
  }
  std::vector<int> assign(n, 0);
  for (int it = 0; it < iters; ++it) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto v = c.vector_at(r);
      double best = 1e300;
      for (int i = 0; i < k; ++i) {
        double d2 = 0;
        for (std::uint32_t d = 0; d < dim; ++d) {
          const double diff = v[d] - centers[i][d];
          d2 += diff * diff;
        }
        if (d2 < best) {
          best = d2;
          assign[r] = i;
        }
      }
    }
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto v = c.vector_at(r);
      for (std::uint32_t d = 0; d < dim; ++d) sums[assign[r]][d] += v[d];
      ++counts[assign[r]];
    }
    for (int i = 0; i < k; ++i)
      if (counts[i] > 0)
        for (std::uint32_t d = 0; d < dim; ++d)
          centers[i][d] = sums[i][d] / static_cast<double>(counts[i]);
  }
  double inertia = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto v = c.vector_at(r);
    double d2 = 0;
    for (std::uint32_t d = 0; d < dim; ++d) {
      const double diff = v[d] - centers[assign[r]][d];
      d2 += diff * diff;
    }
    inertia += d2;
  }
  return inertia;
}

}  // namespace

TEST_CASE("table sizes scale linearly") {
  const auto s1 = table_sizes(0.01);
  CHECK(s1.part == 2000);
  CHECK(s1.partsupp == 8000);
  CHECK(s1.supplier == 100);
  CHECK(s1.orders == 15000);
  CHECK(s1.lineitem == 60000);

  const auto s2 = table_sizes(0.02);
  CHECK(s2.partsupp == 2 * s1.partsupp);
  CHECK(s2.lineitem == 2 * s1.lineitem);
}

TEST_CASE("generation is deterministic under a fixed seed") {
  BenchmarkSpec spec;
  spec.scale_factor = 0.001;
  spec.vector_dim = 8;
  spec.seed = 42;

  auto a = generate(spec);
  auto b = generate(spec);
  for (const auto &name : a.relation_names()) {
    const auto &ra = a.relation(name);
    const auto &rb = b.relation(name);
    REQUIRE(ra.row_count() == rb.row_count());
    for (std::size_t ci = 0; ci < ra.column_count(); ++ci) {
      const auto &ca = ra.column(ci);
      const auto &cb = rb.column(ci);
      CHECK(ca.ints() == cb.ints());
      CHECK(ca.floats() == cb.floats());
      CHECK(ca.strings() == cb.strings());
      CHECK(ca.dates() == cb.dates());
      CHECK(ca.vector_data() == cb.vector_data());
    }
  }
  CHECK(a.manifest_hash() == b.manifest_hash());

  // a different seed changes the data
  spec.seed = 43;
  auto c = generate(spec);
  CHECK(c.relation("partsupp").column("ps_image_embedding").vector_data() !=
        a.relation("partsupp").column("ps_image_embedding").vector_data());
}

TEST_CASE("foreign keys are consistent") {
  const auto &catalog = testsupport::small_catalog();
  const auto &ps = catalog.relation("partsupp");
  const auto &li = catalog.relation("lineitem");
  const auto &orders = catalog.relation("orders");

  const auto parts = catalog.relation("part").row_count();
  const auto supps = catalog.relation("supplier").row_count();
  for (std::size_t r = 0; r < ps.row_count(); ++r) {
    const auto pk = ps.column("ps_partkey").int_at(r);
    const auto sk = ps.column("ps_suppkey").int_at(r);
    CHECK(pk >= 1);
    CHECK(pk <= static_cast<std::int64_t>(parts));
    CHECK(sk >= 1);
    CHECK(sk <= static_cast<std::int64_t>(supps));
  }

  // every partsupp pair appears in lineitem at least once
  std::set<std::pair<std::int64_t, std::int64_t>> li_pairs;
  for (std::size_t r = 0; r < li.row_count(); ++r)
    li_pairs.emplace(li.column("l_partkey").int_at(r),
                     li.column("l_suppkey").int_at(r));
  for (std::size_t r = 0; r < ps.row_count(); ++r) {
    CHECK(li_pairs.count({ps.column("ps_partkey").int_at(r),
                          ps.column("ps_suppkey").int_at(r)}) == 1);
  }

  // lineitem orderkeys reference orders
  for (std::size_t r = 0; r < li.row_count(); ++r) {
    const auto ok = li.column("l_orderkey").int_at(r);
    CHECK(ok >= 1);
    CHECK(ok <= static_cast<std::int64_t>(orders.row_count()));
  }
}

TEST_CASE("gaussian clusters are recoverable by k-means") {
  BenchmarkSpec spec;
  spec.scale_factor = 0.002;
  spec.vector_dim = 16;
  spec.seed = 5;
  spec.cluster_count = 8;
  auto catalog = generate(spec);
  const auto &ps = catalog.relation("partsupp");

  const double inertia1 = kmeans_inertia(ps, "ps_image_embedding", 1, 1);
  const double inertia8 = kmeans_inertia(ps, "ps_image_embedding", 8, 15);
  CHECK(inertia1 / inertia8 >= 8.0);
}

TEST_CASE("skewed distribution has higher local density variance") {
  BenchmarkSpec g;
  g.scale_factor = 0.002;
  g.vector_dim = 16;
  g.seed = 9;
  auto gaussian = generate(g);
  g.distribution = VectorDistribution::SkewedLognormalClustered;
  auto skewed = generate(g);

  // fix one threshold per catalog (1% on a reference query), then measure
  // the spread of per-query counts under fresh queries
  auto spread = [](const Catalog &catalog) {
    const auto &rel = catalog.relation("partsupp");
    Rng rng(31);
    auto ref = perturbed_query(rel, "ps_image_embedding", rng);
    const auto cal = calibrate_threshold(
        catalog, "partsupp", "ps_image_embedding", ref,
        fraction_target(catalog, "partsupp", 0.01));
    std::vector<double> counts;
    for (int i = 0; i < 30; ++i) {
      auto q = perturbed_query(rel, "ps_image_embedding", rng);
      counts.push_back(static_cast<double>(
          vindex::brute_force_range(rel, "ps_image_embedding",
                                    q.components, cal.threshold)
              .row_ids.size()));
    }
    double mean = 0;
    for (double c : counts) mean += c;
    mean /= counts.size();
    double var = 0;
    for (double c : counts) var += (c - mean) * (c - mean);
    return std::sqrt(var / counts.size()) / std::max(mean, 1.0);
  };
  CHECK(spread(skewed) > spread(gaussian));
}

TEST_CASE("calibration hits the requested count") {
  const auto &catalog = testsupport::small_catalog();
  const auto &ps = catalog.relation("partsupp");
  Rng rng(13);

  // 1% of rows
  auto q = perturbed_query(ps, "ps_image_embedding", rng);
  const auto target = fraction_target(catalog, "partsupp", 0.01);
  auto cal = calibrate_threshold(catalog, "partsupp", "ps_image_embedding", q,
                                 target);
  CHECK(cal.within_tolerance);
  CHECK(std::llabs(cal.achieved - target) <= std::max<std::int64_t>(1, target / 50));
  const auto oracle = vindex::brute_force_range(
      ps, "ps_image_embedding", q.components, cal.threshold);
  CHECK(static_cast<std::int64_t>(oracle.row_ids.size()) == cal.achieved);

  // K = 1 with a query equal to a stored vector
  auto stored = storage::make_vector_value(
      ps.column("ps_image_embedding").vector_at(5));
  auto cal1 = calibrate_threshold(catalog, "partsupp", "ps_image_embedding",
                                  stored, 1);
  CHECK(cal1.achieved == 1);

  // K = row_count returns everything
  const auto all = static_cast<std::int64_t>(ps.row_count());
  auto cal_all = calibrate_threshold(catalog, "partsupp", "ps_image_embedding",
                                     q, all);
  CHECK(cal_all.achieved == all);

  // unreachable targets are rejected
  CHECK_THROWS_AS(calibrate_threshold(catalog, "partsupp",
                                      "ps_image_embedding", q, all + 1),
                  DataError);
}

TEST_CASE("instantiate produces a sound oracle and plan shape") {
  const auto &catalog = testsupport::small_catalog();

  auto inst = instantiate(template_by_name("q3"), catalog, 3,
                          Target::match_count(50));
  CHECK(inst.logical.scans.size() == 3);
  CHECK(inst.logical.joins.size() == 2);
  REQUIRE(inst.predicates.size() == 1);
  const auto &meta = inst.predicates.front();
  CHECK(meta.relation == "partsupp");
  CHECK(std::llabs(meta.oracle_count - 50) <= 1);

  // calibration soundness: re-executing the predicate matches the oracle
  const auto &scan = inst.logical.scans.front();
  REQUIRE(scan.vector_predicate.has_value());
  const auto oracle = vindex::brute_force_range(
      catalog.relation("partsupp"), "ps_image_embedding",
      scan.vector_predicate->query_vector.components,
      scan.vector_predicate->threshold);
  CHECK(static_cast<std::int64_t>(oracle.row_ids.size()) == meta.oracle_count);

  // q8 carries two predicates, the primary one first
  auto multi = instantiate(template_by_name("q8"), catalog, 5,
                           Target::match_count(30));
  REQUIRE(multi.predicates.size() == 2);
  CHECK(multi.predicates[0].relation == "partsupp");
  CHECK(multi.predicates[1].relation == "part");

  // q10 carries the tag filter alongside the vector predicate
  auto tagged = instantiate(template_by_name("q10"), catalog, 7,
                            Target::match_count(30));
  bool has_tag_filter = false;
  for (const auto &s : tagged.logical.scans)
    for (const auto &f : s.filters)
      if (f.column == "ps_tag") has_tag_filter = true;
  CHECK(has_tag_filter);

  // frozen thresholds are reused verbatim
  std::map<std::string, double> frozen{
      {"partsupp.ps_image_embedding", meta.threshold}};
  auto re = instantiate(template_by_name("q3"), catalog, 99,
                        Target::match_count(50), &frozen);
  CHECK(re.predicates.front().threshold == meta.threshold);

  CHECK_THROWS_AS(template_by_name("zzz"), UsageError);
}

TEST_CASE("catalog round-trips through the directory format") {
  BenchmarkSpec spec;
  spec.scale_factor = 0.001;
  spec.vector_dim = 8;
  spec.seed = 21;
  auto catalog = generate(spec);

  const auto dir =
      (std::filesystem::temp_directory_path() / "vaq_catalog_rt").string();
  std::filesystem::remove_all(dir);
  save_catalog(catalog, dir);
  auto loaded = load_catalog(dir);

  CHECK(loaded.relation_names() == catalog.relation_names());
  for (const auto &name : catalog.relation_names()) {
    const auto &a = catalog.relation(name);
    const auto &b = loaded.relation(name);
    REQUIRE(a.row_count() == b.row_count());
    for (std::size_t ci = 0; ci < a.column_count(); ++ci) {
      CHECK(a.column(ci).ints() == b.column(ci).ints());
      CHECK(a.column(ci).strings() == b.column(ci).strings());
      CHECK(a.column(ci).dates() == b.column(ci).dates());
      CHECK(a.column(ci).vector_data() == b.column(ci).vector_data());
      // float columns survive the 17-digit CSV round trip exactly
      CHECK(a.column(ci).floats() == b.column(ci).floats());
    }
  }

  // saving twice produces the same manifest hash
  const auto dir2 =
      (std::filesystem::temp_directory_path() / "vaq_catalog_rt2").string();
  std::filesystem::remove_all(dir2);
  save_catalog(catalog, dir2);
  std::ifstream m1(std::filesystem::path(dir) / "manifest.json");
  std::ifstream m2(std::filesystem::path(dir2) / "manifest.json");
  nlohmann::json j1, j2;
  m1 >> j1;
  m2 >> j2;
  CHECK(j1.at("manifest_hash") == j2.at("manifest_hash"));
}
