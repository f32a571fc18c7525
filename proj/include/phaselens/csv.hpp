#pragma once

// Column-oriented tables and their CSV form: comma separated, header row, LF line
// endings, reals printed with 17 significant digits. Columns may have different
// lengths; missing trailing cells are left empty.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "phaselens/error.hpp"
#include "phaselens/matrix.hpp"

namespace phaselens::csv {

struct Column {
  std::string name;
  std::vector<double> values;
};

struct Table {
  std::vector<Column> columns;

  std::size_t row_count() const {
    std::size_t n = 0;
    for (const auto& c : columns) n = std::max(n, c.values.size());
    return n;
  }

  const Column& at(std::string_view name) const {
    for (const auto& c : columns)
      if (c.name == name) return c;
    throw InvalidArgument("no column named '" + std::string(name) + "'");
  }

  bool has(std::string_view name) const {
    for (const auto& c : columns)
      if (c.name == name) return true;
    return false;
  }

  /// Rectangular view; every column must have the same length.
  Matrix to_matrix() const {
    const std::size_t rows = row_count();
    Matrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].values.size() != rows) {
        throw InvalidArgument("column '" + columns[j].name + "' is shorter than the others");
      }
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j].values[i];
    }
    return m;
  }

  static Table from_matrix(const Matrix& m, const std::vector<std::string>& names) {
    if (names.size() != m.cols()) throw InvalidArgument("column name count mismatch");
    Table t;
    for (std::size_t j = 0; j < m.cols(); ++j) t.columns.push_back({names[j], m.column(j)});
    return t;
  }
};

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quote_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write(const Table& table, std::ostream& os) {
  if (table.columns.empty() || table.row_count() == 0) {
    throw InvalidArgument("refusing to write an empty table");
  }
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) os << ',';
    os << quote_field(table.columns[j].name);
  }
  os << '\n';
  const std::size_t rows = table.row_count();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      if (j) os << ',';
      const auto& values = table.columns[j].values;
      if (i < values.size()) {
        if (!std::isfinite(values[i])) {
          throw InvalidArgument("non-finite value in column '" + table.columns[j].name + "'");
        }
        os << format_real(values[i]);
      }
    }
    os << '\n';
  }
}

inline void emit_csv(const Table& table, const std::filesystem::path& path) {
  std::ostringstream buf;
  write(table, buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << buf.str();
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

namespace detail {

inline std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace detail

/// Header row followed by numeric rows. Empty cells may only trail a column.
inline Table parse(std::istream& is, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument(source + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Table t;
  for (auto& name : detail::split_record(line)) t.columns.push_back({std::move(name), {}});

  std::vector<bool> ended(t.columns.size(), false);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_record(line);
    if (fields.size() != t.columns.size()) {
      throw InvalidArgument(source + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.columns.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (fields[j].empty()) {
        ended[j] = true;
        continue;
      }
      if (ended[j]) {
        throw InvalidArgument(source + ":" + std::to_string(lineno) + ": gap in column '" +
                              t.columns[j].name + "'");
      }
      char* end = nullptr;
      const double v = std::strtod(fields[j].c_str(), &end);
      if (end == fields[j].c_str() || *end != '\0' || !std::isfinite(v)) {
        throw InvalidArgument(source + ":" + std::to_string(lineno) + ": not a number: '" +
                              fields[j] + "'");
      }
      t.columns[j].values.push_back(v);
    }
  }
  if (t.row_count() == 0) throw InvalidArgument(source + ": no data rows");
  return t;
}

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in, path.string());
}

}  // namespace phaselens::csv
