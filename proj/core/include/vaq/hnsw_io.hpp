#pragma once

#include <string>

#include "vaq/hnsw.hpp"

namespace vaq::vindex {

// Versioned binary graph file. Header: magic "VQIX", format version, dim,
// M, ef_construction, node count; then search defaults, entry point and the
// per-node adjacency. The loaded index must be attach()ed to its relation
// before searching.
void save_index(const HnswIndex &index, const std::string &path);
HnswIndex load_index(const std::string &path);

}  // namespace vaq::vindex
