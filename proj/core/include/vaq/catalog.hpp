#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "vaq/hnsw.hpp"
#include "vaq/storage.hpp"

namespace vaq {

// Hash map over an int64 key column, built lazily per (table, column).
// Backs index nested-loop joins.
struct KeyIndex {
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> rows_by_key;
};

// Set of sealed relations plus their vector indexes. Immutable after
// loading; safe for concurrent readers.
class Catalog {
 public:
  storage::Relation &add_relation(storage::Relation r);

  bool has_relation(const std::string &name) const {
    return relations_.count(name) > 0;
  }
  const storage::Relation &relation(const std::string &name) const;
  storage::Relation &relation(const std::string &name);
  std::vector<std::string> relation_names() const;

  void add_index(std::shared_ptr<vindex::HnswIndex> index);
  // nullptr when the (table, column) pair has no index.
  const vindex::HnswIndex *find_index(const std::string &table,
                                      const std::string &column) const;
  std::vector<const vindex::HnswIndex *> indexes() const;

  const KeyIndex &key_index(const std::string &table,
                            const std::string &column) const;

  std::uint64_t manifest_hash() const { return manifest_hash_; }
  void set_manifest_hash(std::uint64_t h) { manifest_hash_ = h; }

  const nlohmann::json &meta() const { return meta_; }
  void set_meta(nlohmann::json meta) { meta_ = std::move(meta); }

 private:
  std::map<std::string, storage::Relation> relations_;
  std::map<std::pair<std::string, std::string>,
           std::shared_ptr<vindex::HnswIndex>>
      indexes_;
  mutable std::map<std::pair<std::string, std::string>, KeyIndex> key_indexes_;
  std::uint64_t manifest_hash_ = 0;
  nlohmann::json meta_;
};

// Catalog directory layout: manifest.json, <table>.csv per table,
// <table>.<column>.fvecs per vector column, optional <table>.<column>.hnsw.
void save_catalog(const Catalog &catalog, const std::string &dir);
Catalog load_catalog(const std::string &dir);

// Loads a serialized index for (table, column) if the sidecar file exists.
bool try_load_index(Catalog &catalog, const std::string &dir,
                    const std::string &table, const std::string &column);

std::string index_file_name(const std::string &table,
                            const std::string &column);

}  // namespace vaq
