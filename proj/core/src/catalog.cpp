#include "vaq/catalog.hpp"

#include <filesystem>
#include <fstream>

#include "vaq/hnsw_io.hpp"
#include "vaq/storage_io.hpp"

namespace vaq {

namespace fs = std::filesystem;
using nlohmann::json;
using storage::ColumnKind;
using storage::ColumnType;
using storage::Relation;

Relation &Catalog::add_relation(Relation r) {
  const std::string name = r.name();
  auto [it, inserted] = relations_.emplace(name, std::move(r));
  if (!inserted) throw DataError("catalog already has relation '" + name + "'");
  return it->second;
}

const Relation &Catalog::relation(const std::string &name) const {
  auto it = relations_.find(name);
  if (it == relations_.end())
    throw DataError("catalog has no relation '" + name + "'");
  return it->second;
}

Relation &Catalog::relation(const std::string &name) {
  auto it = relations_.find(name);
  if (it == relations_.end())
    throw DataError("catalog has no relation '" + name + "'");
  return it->second;
}

std::vector<std::string> Catalog::relation_names() const {
  std::vector<std::string> names;
  names.reserve(relations_.size());
  for (const auto &[name, _] : relations_) names.push_back(name);
  return names;
}

void Catalog::add_index(std::shared_ptr<vindex::HnswIndex> index) {
  indexes_[{index->table(), index->column()}] = std::move(index);
}

const vindex::HnswIndex *Catalog::find_index(const std::string &table,
                                             const std::string &column) const {
  auto it = indexes_.find({table, column});
  return it == indexes_.end() ? nullptr : it->second.get();
}

std::vector<const vindex::HnswIndex *> Catalog::indexes() const {
  std::vector<const vindex::HnswIndex *> out;
  for (const auto &[_, idx] : indexes_) out.push_back(idx.get());
  return out;
}

const KeyIndex &Catalog::key_index(const std::string &table,
                                   const std::string &column) const {
  const auto key = std::make_pair(table, column);
  auto it = key_indexes_.find(key);
  if (it != key_indexes_.end()) return it->second;

  const auto &rel = relation(table);
  const auto &col = rel.column(column);
  if (col.type().kind != ColumnKind::Int64)
    throw DataError("key index requires an int64 column, got '" + column +
                    "' of kind " + storage::kind_name(col.type().kind));
  KeyIndex ki;
  ki.rows_by_key.reserve(rel.row_count());
  for (std::size_t row = 0; row < rel.row_count(); ++row)
    ki.rows_by_key[col.int_at(row)].push_back(static_cast<std::uint32_t>(row));
  return key_indexes_.emplace(key, std::move(ki)).first->second;
}

namespace {

const char *kind_str(ColumnKind k) { return storage::kind_name(k); }

ColumnType type_from_json(const json &jc) {
  const std::string kind = jc.at("kind").get<std::string>();
  if (kind == "int64") return storage::int64_type();
  if (kind == "float64") return storage::float64_type();
  if (kind == "string") return storage::string_type();
  if (kind == "date") return storage::date_type();
  if (kind == "vector")
    return storage::vector_type(jc.at("dim").get<std::uint32_t>());
  throw DataError("manifest: unknown column kind '" + kind + "'");
}

std::uint64_t hash_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for hashing: " + path.string());
  Fnv1a h;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  return h.digest();
}

}  // namespace

std::string index_file_name(const std::string &table,
                            const std::string &column) {
  return table + "." + column + ".hnsw";
}

void save_catalog(const Catalog &catalog, const std::string &dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["schema_version"] = 1;
  manifest["tool_version"] = kToolVersion;
  manifest["generator"] = catalog.meta();

  json tables = json::array();
  Fnv1a content_hash;
  for (const auto &name : catalog.relation_names()) {
    const auto &rel = catalog.relation(name);
    json jt;
    jt["name"] = name;
    jt["rows"] = rel.row_count();
    json cols = json::array();
    for (const auto &c : rel.columns()) {
      json jc;
      jc["name"] = c.name();
      jc["kind"] = kind_str(c.type().kind);
      if (c.type().kind == ColumnKind::Vector) jc["dim"] = c.type().dim;
      cols.push_back(jc);
    }
    jt["columns"] = cols;

    const fs::path csv_path = fs::path(dir) / (name + ".csv");
    storage::write_csv(rel, csv_path.string());
    jt["csv"] = csv_path.filename().string();
    jt["csv_hash"] = hex64(hash_file(csv_path));
    content_hash.update(jt["csv_hash"].get<std::string>());

    json vecs = json::array();
    for (const auto &c : rel.columns()) {
      if (c.type().kind != ColumnKind::Vector) continue;
      const fs::path fv = fs::path(dir) / (name + "." + c.name() + ".fvecs");
      storage::write_fvecs(rel, c.name(), fv.string());
      json jv;
      jv["column"] = c.name();
      jv["file"] = fv.filename().string();
      jv["hash"] = hex64(hash_file(fv));
      content_hash.update(jv["hash"].get<std::string>());
      vecs.push_back(jv);
    }
    jt["vectors"] = vecs;
    tables.push_back(jt);
  }
  manifest["tables"] = tables;
  content_hash.update(catalog.meta().dump());
  manifest["manifest_hash"] = hex64(content_hash.digest());

  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
  out << manifest.dump(2) << "\n";
  if (!out) throw DataError("cannot write manifest.json in " + dir);
}

Catalog load_catalog(const std::string &dir) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in)
    throw DataError("no manifest.json in catalog directory: " + dir);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception &e) {
    throw DataError("malformed manifest.json: " + std::string(e.what()));
  }

  Catalog catalog;
  catalog.set_meta(manifest.value("generator", json::object()));
  catalog.set_manifest_hash(
      std::stoull(manifest.at("manifest_hash").get<std::string>(), nullptr, 16));

  for (const auto &jt : manifest.at("tables")) {
    std::vector<std::pair<std::string, ColumnType>> schema;
    for (const auto &jc : jt.at("columns"))
      schema.emplace_back(jc.at("name").get<std::string>(),
                          type_from_json(jc));
    Relation rel(jt.at("name").get<std::string>(), schema);
    storage::load_csv(rel, (fs::path(dir) / jt.at("csv").get<std::string>()).string());
    for (const auto &jv : jt.at("vectors"))
      storage::load_fvecs(rel, jv.at("column").get<std::string>(),
                          (fs::path(dir) / jv.at("file").get<std::string>()).string());
    rel.seal();
    if (rel.row_count() != jt.at("rows").get<std::size_t>())
      throw DataError("table '" + rel.name() + "' has " +
                      std::to_string(rel.row_count()) +
                      " rows, manifest says " +
                      std::to_string(jt.at("rows").get<std::size_t>()));
    catalog.add_relation(std::move(rel));
  }
  return catalog;
}

bool try_load_index(Catalog &catalog, const std::string &dir,
                    const std::string &table, const std::string &column) {
  const fs::path path = fs::path(dir) / index_file_name(table, column);
  if (!fs::exists(path)) return false;
  auto index = std::make_shared<vindex::HnswIndex>(
      vindex::load_index(path.string()));
  index->attach(catalog.relation(table), column);
  catalog.add_index(std::move(index));
  return true;
}

}  // namespace vaq
