#include "vaq/storage_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace vaq::storage {

namespace {

// One CSV record; handles quoted fields with doubled quotes. No embedded
// newlines (the catalog writer never produces them).
std::vector<std::string> split_csv_line(const std::string &line,
                                        std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r') {
      // tolerate CRLF
    } else {
      cur.push_back(c);
    }
  }
  if (in_quotes)
    throw DataError("CSV line " + std::to_string(line_no) +
                    ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::int64_t parse_int(const std::string &s, std::size_t line_no,
                       const std::string &col) {
  std::int64_t v = 0;
  const auto *begin = s.data();
  const auto *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw DataError("CSV line " + std::to_string(line_no) + ", column '" +
                    col + "': cannot parse integer from '" + s + "'");
  return v;
}

double parse_float(const std::string &s, std::size_t line_no,
                   const std::string &col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw DataError("CSV line " + std::to_string(line_no) + ", column '" +
                    col + "': cannot parse float from '" + s + "'");
  }
}

std::string escape_csv(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

std::size_t load_csv(Relation &relation, const std::string &path,
                     const ColumnMapping &mapping) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);

  std::string header;
  if (!std::getline(in, header)) return 0;  // empty file, nothing to load
  const auto header_fields = split_csv_line(header, 1);

  // Resolve each CSV field to a relation column (or skip it).
  struct Target {
    bool skip = false;
    std::size_t column = 0;
  };
  std::vector<Target> targets(header_fields.size());
  for (std::size_t i = 0; i < header_fields.size(); ++i) {
    std::string name = header_fields[i];
    if (auto it = mapping.find(name); it != mapping.end()) name = it->second;
    if (!relation.has_column(name)) {
      targets[i].skip = true;
      continue;
    }
    targets[i].column = relation.column_index(name);
    if (relation.column(targets[i].column).type().kind == ColumnKind::Vector)
      throw DataError("column '" + name + "' is a vector column; load it from "
                      "fvecs, not CSV");
  }

  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header_fields.size())
      throw DataError("CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header_fields.size()) + " fields, got " +
                      std::to_string(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (targets[i].skip) continue;
      auto &col = relation.column(targets[i].column);
      switch (col.type().kind) {
        case ColumnKind::Int64:
          col.append_int(parse_int(fields[i], line_no, col.name()));
          break;
        case ColumnKind::Float64:
          col.append_float(parse_float(fields[i], line_no, col.name()));
          break;
        case ColumnKind::Date:
          col.append_date(static_cast<std::int32_t>(
              parse_int(fields[i], line_no, col.name())));
          break;
        case ColumnKind::String:
          col.append_string(fields[i]);
          break;
        case ColumnKind::Vector:
          break;  // unreachable, rejected above
      }
    }
    ++rows;
  }
  relation.refresh_row_count();
  return rows;
}

void write_csv(const Relation &relation, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open CSV file for writing: " + path);

  bool first = true;
  for (const auto &c : relation.columns()) {
    if (c.type().kind == ColumnKind::Vector) continue;
    if (!first) out << ',';
    out << escape_csv(c.name());
    first = false;
  }
  out << '\n';

  const std::size_t n = relation.row_count();
  for (std::size_t row = 0; row < n; ++row) {
    first = true;
    for (const auto &c : relation.columns()) {
      if (c.type().kind == ColumnKind::Vector) continue;
      if (!first) out << ',';
      first = false;
      switch (c.type().kind) {
        case ColumnKind::Int64: out << c.int_at(row); break;
        case ColumnKind::Date: out << c.date_at(row); break;
        case ColumnKind::Float64: {
          std::ostringstream ss;
          ss.precision(17);
          ss << c.float_at(row);
          out << ss.str();
          break;
        }
        case ColumnKind::String: out << escape_csv(c.string_at(row)); break;
        case ColumnKind::Vector: break;
      }
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::size_t load_fvecs(Relation &relation, const std::string &column,
                       const std::string &path) {
  auto &col = relation.column(column);
  if (col.type().kind != ColumnKind::Vector)
    throw DataError("column '" + column + "' is not a vector column");
  const std::uint32_t dim = col.type().dim;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open fvecs file: " + path);

  std::size_t records = 0;
  std::vector<float> buf(dim);
  while (true) {
    std::int32_t rec_dim = 0;
    in.read(reinterpret_cast<char *>(&rec_dim), sizeof(rec_dim));
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != sizeof(rec_dim))
      throw DataError("fvecs '" + path + "': truncated record header at record " +
                      std::to_string(records));
    if (rec_dim != static_cast<std::int32_t>(dim))
      throw DataError("fvecs '" + path + "': record " +
                      std::to_string(records) + " has dim " +
                      std::to_string(rec_dim) + ", column expects " +
                      std::to_string(dim));
    in.read(reinterpret_cast<char *>(buf.data()),
            static_cast<std::streamsize>(dim * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(dim * sizeof(float)))
      throw DataError("fvecs '" + path + "': truncated record " +
                      std::to_string(records));
    col.append_vector(buf);
    ++records;
  }
  relation.refresh_row_count();
  return records;
}

void write_fvecs(const Relation &relation, const std::string &column,
                 const std::string &path) {
  const auto &col = relation.column(column);
  if (col.type().kind != ColumnKind::Vector)
    throw DataError("column '" + column + "' is not a vector column");
  const std::int32_t dim = static_cast<std::int32_t>(col.type().dim);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open fvecs file for writing: " + path);
  const std::size_t n = col.size();
  for (std::size_t row = 0; row < n; ++row) {
    out.write(reinterpret_cast<const char *>(&dim), sizeof(dim));
    const auto v = col.vector_at(row);
    out.write(reinterpret_cast<const char *>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace vaq::storage
