#include "vaq/hnsw_io.hpp"

#include <cstring>
#include <fstream>

#include "vaq/common.hpp"

namespace vaq::vindex {

namespace {

constexpr char kMagic[4] = {'V', 'Q', 'I', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::ofstream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

template <typename T>
void get(std::ifstream &in, T &v, const std::string &path) {
  in.read(reinterpret_cast<char *>(&v), sizeof(v));
  if (in.gcount() != sizeof(v))
    throw DataError("index file truncated: " + path);
}

void put_string(std::ofstream &out, const std::string &s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::ifstream &in, const std::string &path) {
  std::uint32_t len = 0;
  get(in, len, path);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (in.gcount() != static_cast<std::streamsize>(len))
    throw DataError("index file truncated: " + path);
  return s;
}

}  // namespace

void save_index(const HnswIndex &index, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open index file for writing: " + path);

  out.write(kMagic, sizeof(kMagic));
  put(out, kFormatVersion);
  put(out, index.dim_);
  put(out, index.params_.m);
  put(out, index.params_.ef_construction);
  put(out, static_cast<std::uint64_t>(index.node_count_));
  put(out, index.params_.ef_search);
  put(out, index.params_.seed);
  put(out, index.entry_point_);
  put(out, static_cast<std::int32_t>(index.max_level_));
  put(out, index.fingerprint_);
  put_string(out, index.table_);
  put_string(out, index.column_);

  for (const auto &levels : index.links_) {
    put(out, static_cast<std::uint32_t>(levels.size()));
    for (const auto &nbrs : levels) {
      put(out, static_cast<std::uint32_t>(nbrs.size()));
      out.write(reinterpret_cast<const char *>(nbrs.data()),
                static_cast<std::streamsize>(nbrs.size() * sizeof(std::uint32_t)));
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

HnswIndex load_index(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index file: " + path);

  char magic[4];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not an index file: " + path);
  std::uint32_t version = 0;
  get(in, version, path);
  if (version != kFormatVersion)
    throw DataError("unsupported index format version " +
                    std::to_string(version) + " in " + path);

  HnswIndex index;
  std::uint64_t node_count = 0;
  std::int32_t max_level = 0;
  get(in, index.dim_, path);
  get(in, index.params_.m, path);
  get(in, index.params_.ef_construction, path);
  get(in, node_count, path);
  get(in, index.params_.ef_search, path);
  get(in, index.params_.seed, path);
  get(in, index.entry_point_, path);
  get(in, max_level, path);
  get(in, index.fingerprint_, path);
  index.table_ = get_string(in, path);
  index.column_ = get_string(in, path);
  index.node_count_ = static_cast<std::uint32_t>(node_count);
  index.max_level_ = max_level;

  index.links_.resize(index.node_count_);
  for (auto &levels : index.links_) {
    std::uint32_t level_count = 0;
    get(in, level_count, path);
    levels.resize(level_count);
    for (auto &nbrs : levels) {
      std::uint32_t n = 0;
      get(in, n, path);
      nbrs.resize(n);
      in.read(reinterpret_cast<char *>(nbrs.data()),
              static_cast<std::streamsize>(n * sizeof(std::uint32_t)));
      if (in.gcount() != static_cast<std::streamsize>(n * sizeof(std::uint32_t)))
        throw DataError("index file truncated: " + path);
    }
  }
  return index;
}

}  // namespace vaq::vindex
