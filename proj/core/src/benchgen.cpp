#include "vaq/benchgen.hpp"

#include <algorithm>
#include <cmath>

namespace vaq::bench {

using storage::ColumnType;
using storage::Relation;

VectorDistribution parse_distribution(const std::string &name) {
  if (name == "gaussian-clustered") return VectorDistribution::GaussianClustered;
  if (name == "skewed-lognormal-clustered")
    return VectorDistribution::SkewedLognormalClustered;
  if (name == "uniform") return VectorDistribution::Uniform;
  throw UsageError("unknown distribution '" + name +
                   "' (valid: gaussian-clustered, "
                   "skewed-lognormal-clustered, uniform)");
}

const char *distribution_name(VectorDistribution d) {
  switch (d) {
    case VectorDistribution::GaussianClustered: return "gaussian-clustered";
    case VectorDistribution::SkewedLognormalClustered:
      return "skewed-lognormal-clustered";
    case VectorDistribution::Uniform: return "uniform";
  }
  return "?";
}

void BenchmarkSpec::validate() const {
  if (!(scale_factor > 0.0)) throw UsageError("scale factor must be > 0");
  if (vector_dim < 1) throw UsageError("vector dim must be >= 1");
  if (cluster_count < 1) throw UsageError("cluster count must be >= 1");
}

nlohmann::json BenchmarkSpec::to_json() const {
  return nlohmann::json{{"scale_factor", scale_factor},
                        {"vector_dim", vector_dim},
                        {"distribution", distribution_name(distribution)},
                        {"seed", seed},
                        {"cluster_count", cluster_count}};
}

BenchmarkSpec BenchmarkSpec::from_json(const nlohmann::json &j) {
  BenchmarkSpec spec;
  spec.scale_factor = j.at("scale_factor").get<double>();
  spec.vector_dim = j.at("vector_dim").get<std::uint32_t>();
  spec.distribution = parse_distribution(j.at("distribution").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.cluster_count = j.at("cluster_count").get<std::uint32_t>();
  return spec;
}

TableSizes table_sizes(double scale_factor) {
  auto scaled = [&](double base) {
    return static_cast<std::size_t>(
        std::max<std::int64_t>(1, std::llround(base * scale_factor)));
  };
  TableSizes s;
  s.part = scaled(200000);
  s.supplier = scaled(10000);
  s.partsupp = 4 * s.part;
  s.orders = scaled(1500000);
  s.lineitem = scaled(6000000);
  return s;
}

namespace {

constexpr std::int32_t kDateLo = 9000;   // o_orderdate range, days
constexpr std::int32_t kDateHi = 12000;
constexpr int kNations = 25;
constexpr int kBrands = 25;
constexpr int kTagVocab = 32;

struct ClusterModel {
  std::vector<std::vector<float>> centers;
  std::vector<double> spreads;
  std::vector<double> weight_cum;
  VectorDistribution distribution;
  std::uint32_t dim;
};

ClusterModel make_cluster_model(const BenchmarkSpec &spec, Rng &rng) {
  ClusterModel m;
  m.distribution = spec.distribution;
  m.dim = spec.vector_dim;
  const std::uint32_t c = spec.cluster_count;
  m.centers.resize(c);
  m.spreads.resize(c, 1.0);
  for (std::uint32_t i = 0; i < c; ++i) {
    m.centers[i].resize(spec.vector_dim);
    for (auto &x : m.centers[i])
      x = static_cast<float>(rng.normal(0.0, 10.0));
  }
  double acc = 0.0;
  m.weight_cum.resize(c);
  switch (spec.distribution) {
    case VectorDistribution::GaussianClustered:
    case VectorDistribution::Uniform:
      for (std::uint32_t i = 0; i < c; ++i) m.weight_cum[i] = acc += 1.0;
      break;
    case VectorDistribution::SkewedLognormalClustered:
      // Skewed cluster population and heterogeneous spreads: dense cores
      // next to diffuse clouds, so local density varies widely.
      for (std::uint32_t i = 0; i < c; ++i) {
        m.weight_cum[i] = acc += 1.0 / std::pow(static_cast<double>(i + 1), 1.2);
        m.spreads[i] = rng.lognormal(0.0, 1.0);
      }
      break;
  }
  return m;
}

std::pair<std::vector<float>, std::uint32_t> sample_vector(
    const ClusterModel &m, Rng &rng) {
  std::vector<float> v(m.dim);
  if (m.distribution == VectorDistribution::Uniform) {
    for (auto &x : v) x = static_cast<float>(rng.uniform(-10.0, 10.0));
    const auto pseudo_cluster = static_cast<std::uint32_t>(
        rng.uniform_u64(m.centers.size()));
    return {std::move(v), pseudo_cluster};
  }
  const auto cluster = static_cast<std::uint32_t>(rng.zipf(m.weight_cum));
  double scale = m.spreads[cluster];
  if (m.distribution == VectorDistribution::SkewedLognormalClustered)
    scale *= rng.lognormal(0.0, 0.75);  // heavy-tailed radial distances
  for (std::uint32_t i = 0; i < m.dim; ++i)
    v[i] = m.centers[cluster][i] + static_cast<float>(rng.normal(0.0, scale));
  return {std::move(v), cluster};
}

double money(Rng &rng, double lo, double hi) {
  return std::floor(rng.uniform(lo, hi) * 100.0) / 100.0;
}

}  // namespace

Catalog generate(const BenchmarkSpec &spec) {
  spec.validate();
  const auto sizes = table_sizes(spec.scale_factor);
  Catalog catalog;

  // part -------------------------------------------------------------------
  {
    Rng rng(mix_seed(spec.seed, fnv1a("part")));
    Rng vec_rng(mix_seed(spec.seed, fnv1a("part:vectors")));
    const auto model = make_cluster_model(spec, vec_rng);
    Relation rel("part",
                 {{"p_partkey", storage::int64_type()},
                  {"p_name", storage::string_type()},
                  {"p_brand", storage::string_type()},
                  {"p_retailprice", storage::float64_type()},
                  {"p_embedding", storage::vector_type(spec.vector_dim)}});
    for (std::size_t i = 0; i < sizes.part; ++i) {
      rel.column(0).append_int(static_cast<std::int64_t>(i + 1));
      rel.column(1).append_string("part_" + std::to_string(i + 1));
      rel.column(2).append_string(
          "brand_" + std::to_string(rng.uniform_int(0, kBrands - 1)));
      rel.column(3).append_float(money(rng, 900.0, 2000.0));
      auto [v, cluster] = sample_vector(model, vec_rng);
      (void)cluster;
      rel.column(4).append_vector(v);
    }
    rel.seal();
    catalog.add_relation(std::move(rel));
  }

  // supplier ---------------------------------------------------------------
  {
    Rng rng(mix_seed(spec.seed, fnv1a("supplier")));
    Relation rel("supplier", {{"s_suppkey", storage::int64_type()},
                              {"s_name", storage::string_type()},
                              {"s_nationkey", storage::int64_type()}});
    for (std::size_t i = 0; i < sizes.supplier; ++i) {
      rel.column(0).append_int(static_cast<std::int64_t>(i + 1));
      rel.column(1).append_string("supplier_" + std::to_string(i + 1));
      rel.column(2).append_int(rng.uniform_int(0, kNations - 1));
    }
    rel.seal();
    catalog.add_relation(std::move(rel));
  }

  // partsupp ---------------------------------------------------------------
  std::vector<std::pair<std::int64_t, std::int64_t>> ps_pairs;
  ps_pairs.reserve(sizes.partsupp);
  {
    Rng rng(mix_seed(spec.seed, fnv1a("partsupp")));
    Rng img_rng(mix_seed(spec.seed, fnv1a("partsupp:image")));
    Rng txt_rng(mix_seed(spec.seed, fnv1a("partsupp:text")));
    const auto img_model = make_cluster_model(spec, img_rng);
    const auto txt_model = make_cluster_model(spec, txt_rng);
    const auto tag_cum = zipf_cumulative(kTagVocab, 1.1);

    Relation rel("partsupp",
                 {{"ps_partkey", storage::int64_type()},
                  {"ps_suppkey", storage::int64_type()},
                  {"ps_availqty", storage::int64_type()},
                  {"ps_supplycost", storage::float64_type()},
                  {"ps_tag", storage::string_type()},
                  {"ps_image_embedding", storage::vector_type(spec.vector_dim)},
                  {"ps_text_embedding", storage::vector_type(spec.vector_dim)}});
    const auto supp_stride =
        std::max<std::size_t>(1, sizes.supplier / 4);
    for (std::size_t p = 0; p < sizes.part; ++p) {
      for (int k = 0; k < 4; ++k) {
        const auto suppkey = static_cast<std::int64_t>(
            (p + static_cast<std::size_t>(k) * supp_stride) % sizes.supplier +
            1);
        ps_pairs.emplace_back(static_cast<std::int64_t>(p + 1), suppkey);
        rel.column(0).append_int(static_cast<std::int64_t>(p + 1));
        rel.column(1).append_int(suppkey);
        rel.column(2).append_int(rng.uniform_int(1, 9999));
        rel.column(3).append_float(money(rng, 1.0, 1000.0));

        auto [img, cluster] = sample_vector(img_model, img_rng);
        auto [txt, txt_cluster] = sample_vector(txt_model, txt_rng);
        (void)txt_cluster;

        // Tag vocabulary correlated with the image cluster.
        std::size_t tag = cluster % kTagVocab;
        if (rng.uniform() >= 0.6) tag = rng.zipf(tag_cum);
        rel.column(4).append_string("tag_" + std::to_string(tag));
        rel.column(5).append_vector(img);
        rel.column(6).append_vector(txt);
      }
    }
    rel.seal();
    catalog.add_relation(std::move(rel));
  }

  // orders -----------------------------------------------------------------
  {
    Rng rng(mix_seed(spec.seed, fnv1a("orders")));
    Relation rel("orders", {{"o_orderkey", storage::int64_type()},
                            {"o_custkey", storage::int64_type()},
                            {"o_orderdate", storage::date_type()},
                            {"o_shippriority", storage::int64_type()}});
    const auto customers =
        static_cast<std::int64_t>(std::max<std::size_t>(1, sizes.orders / 10));
    for (std::size_t i = 0; i < sizes.orders; ++i) {
      rel.column(0).append_int(static_cast<std::int64_t>(i + 1));
      rel.column(1).append_int(rng.uniform_int(1, customers));
      rel.column(2).append_date(
          static_cast<std::int32_t>(rng.uniform_int(kDateLo, kDateHi - 1)));
      rel.column(3).append_int(rng.uniform_int(0, 4));
    }
    rel.seal();
    catalog.add_relation(std::move(rel));
  }

  // lineitem ---------------------------------------------------------------
  {
    Rng rng(mix_seed(spec.seed, fnv1a("lineitem")));
    const auto &orders = catalog.relation("orders");
    Relation rel("lineitem", {{"l_orderkey", storage::int64_type()},
                              {"l_partkey", storage::int64_type()},
                              {"l_suppkey", storage::int64_type()},
                              {"l_quantity", storage::int64_type()},
                              {"l_extendedprice", storage::float64_type()},
                              {"l_discount", storage::float64_type()},
                              {"l_shipdate", storage::date_type()}});
    for (std::size_t i = 0; i < sizes.lineitem; ++i) {
      // The first pass over partsupp pairs guarantees every pair joins to
      // at least one lineitem row.
      const auto &pair =
          i < ps_pairs.size()
              ? ps_pairs[i]
              : ps_pairs[rng.uniform_u64(ps_pairs.size())];
      const auto orderkey =
          static_cast<std::int64_t>(rng.uniform_u64(sizes.orders)) + 1;
      const auto orderdate =
          orders.column("o_orderdate").date_at(static_cast<std::size_t>(orderkey - 1));
      rel.column(0).append_int(orderkey);
      rel.column(1).append_int(pair.first);
      rel.column(2).append_int(pair.second);
      rel.column(3).append_int(rng.uniform_int(1, 50));
      rel.column(4).append_float(money(rng, 1000.0, 100000.0));
      rel.column(5).append_float(
          static_cast<double>(rng.uniform_int(0, 10)) / 100.0);
      rel.column(6).append_date(orderdate +
                                static_cast<std::int32_t>(rng.uniform_int(1, 120)));
    }
    rel.seal();
    catalog.add_relation(std::move(rel));
  }

  catalog.set_meta(spec.to_json());
  catalog.set_manifest_hash(fnv1a(spec.to_json().dump()));
  return catalog;
}

double mean_pairwise_distance(const storage::Relation &relation,
                              const std::string &column, Rng &rng, int pairs) {
  const auto &col = relation.column(column);
  const auto n = relation.row_count();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const auto a = rng.uniform_u64(n);
    auto b = rng.uniform_u64(n);
    if (b == a) b = (b + 1) % n;
    acc += std::sqrt(vindex::l2_distance_sq(col.vector_at(a), col.vector_at(b)));
  }
  return acc / pairs;
}

storage::VectorValue perturbed_query(const storage::Relation &relation,
                                     const std::string &column, Rng &rng,
                                     double noise_frac) {
  const auto &col = relation.column(column);
  if (relation.row_count() == 0)
    throw DataError("cannot draw a query vector from empty relation");
  const double sigma =
      noise_frac * mean_pairwise_distance(relation, column, rng);
  const auto base = col.vector_at(rng.uniform_u64(relation.row_count()));
  std::vector<float> q(base.begin(), base.end());
  for (auto &x : q) x += static_cast<float>(rng.normal(0.0, sigma));
  return storage::make_vector_value(q);
}

}  // namespace vaq::bench
