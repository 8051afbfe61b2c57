#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vaq/rng.hpp"
#include "vaq/storage.hpp"
#include "vaq/storage_io.hpp"

using namespace vaq;
using namespace vaq::storage;

namespace {

std::filesystem::path temp_file(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("vaq_storage_" + name);
}

void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("create_relation basics") {
  auto rel = create_relation(
      "t", {{"id", int64_type()}, {"emb", vector_type(4)}});
  CHECK(rel.row_count() == 0);
  CHECK(rel.column_count() == 2);

  CHECK_THROWS_AS(create_relation("t", {{"a", int64_type()},
                                        {"a", float64_type()}}),
                  DataError);
  CHECK_THROWS_AS(create_relation("t", {{"emb", vector_type(0)}}), DataError);
  CHECK_THROWS_AS(create_relation("t", {}), DataError);
}

TEST_CASE("vector values must be finite and sized") {
  auto rel = create_relation("t", {{"emb", vector_type(3)}});
  const float bad[3] = {1.0f, std::numeric_limits<float>::infinity(), 0.0f};
  CHECK_THROWS_AS(rel.column(0).append_vector(std::span<const float>(bad, 3)),
                  DataError);
  const float short_vec[2] = {1.0f, 2.0f};
  CHECK_THROWS_AS(
      rel.column(0).append_vector(std::span<const float>(short_vec, 2)),
      DataError);
}

TEST_CASE("CSV load counts rows and parses kinds") {
  const auto path = temp_file("basic.csv");
  write_file(path, "a,b\n1,2\n3,4\n5,6\n");
  auto rel = create_relation("t", {{"a", int64_type()}, {"b", int64_type()}});
  CHECK(load_csv(rel, path.string()) == 3);
  rel.seal();
  CHECK(rel.row_count() == 3);
  CHECK(rel.column("a").int_at(2) == 5);
}

TEST_CASE("CSV empty file loads zero rows") {
  const auto path = temp_file("empty.csv");
  write_file(path, "");
  auto rel = create_relation("t", {{"a", int64_type()}});
  CHECK(load_csv(rel, path.string()) == 0);
}

TEST_CASE("CSV parse failure reports the line") {
  const auto path = temp_file("bad.csv");
  write_file(path, "a\n1\nnope\n");
  auto rel = create_relation("t", {{"a", int64_type()}});
  try {
    load_csv(rel, path.string());
    FAIL("expected parse error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("CSV arity mismatch is an error") {
  const auto path = temp_file("arity.csv");
  write_file(path, "a,b\n1,2\n3\n");
  auto rel = create_relation("t", {{"a", int64_type()}, {"b", int64_type()}});
  CHECK_THROWS_AS(load_csv(rel, path.string()), DataError);
}

TEST_CASE("CSV quoted fields") {
  const auto path = temp_file("quoted.csv");
  write_file(path, "a,s\n1,\"x,\"\"y\"\"\"\n");
  auto rel = create_relation("t", {{"a", int64_type()}, {"s", string_type()}});
  CHECK(load_csv(rel, path.string()) == 1);
  CHECK(rel.column("s").string_at(0) == "x,\"y\"");
}

TEST_CASE("fvecs load and errors") {
  const auto path = temp_file("vec.fvecs");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::int32_t dim = 4;
    const float a[4] = {1, 2, 3, 4}, b[4] = {5, 6, 7, 8};
    out.write(reinterpret_cast<const char *>(&dim), 4);
    out.write(reinterpret_cast<const char *>(a), 16);
    out.write(reinterpret_cast<const char *>(&dim), 4);
    out.write(reinterpret_cast<const char *>(b), 16);
  }
  auto rel = create_relation("t", {{"emb", vector_type(4)}});
  CHECK(load_fvecs(rel, "emb", path.string()) == 2);
  rel.seal();
  CHECK(rel.row_count() == 2);
  CHECK(rel.column("emb").vector_at(1)[2] == doctest::Approx(7.0f));

  // dim mismatch
  auto rel3 = create_relation("t", {{"emb", vector_type(3)}});
  CHECK_THROWS_AS(load_fvecs(rel3, "emb", path.string()), DataError);

  // zero-byte file
  const auto empty = temp_file("zero.fvecs");
  write_file(empty, "");
  auto rel_e = create_relation("t", {{"emb", vector_type(4)}});
  CHECK(load_fvecs(rel_e, "emb", empty.string()) == 0);

  // truncated record
  const auto trunc = temp_file("trunc.fvecs");
  {
    std::ofstream out(trunc, std::ios::binary | std::ios::trunc);
    const std::int32_t dim = 4;
    const float a[2] = {1, 2};
    out.write(reinterpret_cast<const char *>(&dim), 4);
    out.write(reinterpret_cast<const char *>(a), 8);
  }
  auto rel_t = create_relation("t", {{"emb", vector_type(4)}});
  CHECK_THROWS_AS(load_fvecs(rel_t, "emb", trunc.string()), DataError);
}

TEST_CASE("fvecs round-trip is byte identical") {
  Rng rng(11);
  auto rel = create_relation("t", {{"emb", vector_type(8)}});
  for (int i = 0; i < 33; ++i) {
    std::vector<float> v(8);
    for (auto &x : v) x = static_cast<float>(rng.normal(0, 3));
    rel.column(0).append_vector(v);
  }
  rel.seal();
  const auto p1 = temp_file("rt1.fvecs");
  const auto p2 = temp_file("rt2.fvecs");
  write_fvecs(rel, "emb", p1.string());

  auto rel2 = create_relation("t", {{"emb", vector_type(8)}});
  CHECK(load_fvecs(rel2, "emb", p1.string()) == 33);
  rel2.seal();
  write_fvecs(rel2, "emb", p2.string());
  CHECK(read_file(p1) == read_file(p2));
  CHECK(!read_file(p1).empty());
}

TEST_CASE("columns agree on length after full load") {
  const auto csv = temp_file("mixed.csv");
  write_file(csv, "id\n1\n2\n");
  const auto fv = temp_file("mixed.fvecs");
  {
    std::ofstream out(fv, std::ios::binary | std::ios::trunc);
    const std::int32_t dim = 2;
    const float a[2] = {1, 2};
    for (int i = 0; i < 2; ++i) {
      out.write(reinterpret_cast<const char *>(&dim), 4);
      out.write(reinterpret_cast<const char *>(a), 8);
    }
  }
  auto rel = create_relation("t", {{"id", int64_type()},
                                   {"emb", vector_type(2)}});
  load_csv(rel, csv.string());
  load_fvecs(rel, "emb", fv.string());
  rel.seal();
  CHECK(rel.row_count() == 2);
  for (const auto &c : rel.columns()) CHECK(c.size() == rel.row_count());

  // mismatched lengths refuse to seal
  auto rel_bad = create_relation("t", {{"id", int64_type()},
                                       {"emb", vector_type(2)}});
  load_csv(rel_bad, csv.string());
  CHECK_THROWS_AS(rel_bad.seal(), DataError);
}

TEST_CASE("stats carry ndv and ranges") {
  auto rel = create_relation("t", {{"k", int64_type()}, {"s", string_type()}});
  for (int i = 0; i < 10; ++i) {
    rel.column(0).append_int(i % 5);
    rel.column(1).append_string(i % 2 ? "x" : "y");
  }
  rel.seal();
  CHECK(rel.column("k").stats()->ndv == 5);
  CHECK(rel.column("k").stats()->min_value == 0);
  CHECK(rel.column("k").stats()->max_value == 4);
  CHECK(rel.column("s").stats()->ndv == 2);
}
