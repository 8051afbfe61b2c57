#pragma once

#include <map>
#include <string>

#include "vaq/storage.hpp"

namespace vaq::storage {

// Maps CSV header names to relation column names. Empty = identity.
using ColumnMapping = std::map<std::string, std::string>;

// Appends rows from an RFC-4180 style CSV (header row required, quoted
// fields with doubled quotes supported). Only scalar columns can be loaded
// this way; every non-vector column of the relation must be present in the
// file. Returns the number of rows appended.
std::size_t load_csv(Relation &relation, const std::string &path,
                     const ColumnMapping &mapping = {});

// Writes the relation's scalar columns as CSV with a header row.
void write_csv(const Relation &relation, const std::string &path);

// fvecs: repeated records of [int32 LE dim][dim x float32 LE].
std::size_t load_fvecs(Relation &relation, const std::string &column,
                       const std::string &path);

void write_fvecs(const Relation &relation, const std::string &column,
                 const std::string &path);

}  // namespace vaq::storage
