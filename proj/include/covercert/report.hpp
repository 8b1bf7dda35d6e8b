#ifndef COVERCERT_REPORT_HPP
#define COVERCERT_REPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "covercert/errors.hpp"

namespace covercert {

// Shortest round-trip decimal form, stable across runs and platforms that
// implement printf correctly; every numeric cell goes through this.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string csv_cell(double v) { return format_g17(v); }
inline std::string csv_cell(bool v) { return v ? "true" : "false"; }
inline std::string csv_cell(std::size_t v) { return std::to_string(v); }
inline std::string csv_cell(const char* v) { return std::string(v); }
inline std::string csv_cell(std::string v) { return v; }

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> cols) : columns(std::move(cols)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
      throw ConfigError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(columns.size()));
    rows.push_back(std::move(cells));
  }

  std::string serialize() const {
    std::string out = "# covercert-schema=1\n";
    append_line(out, columns);
    for (const auto& row : rows) append_line(out, row);
    return out;
  }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += quoted(cells[i]);
    }
    out += '\n';
  }

  static std::string quoted(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string q = "\"";
    for (char c : cell) {
      if (c == '"') q += '"';
      q += c;
    }
    q += '"';
    return q;
  }
};

inline void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create output directory: " + p.parent_path().string());
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + path);
  f << content;
  f.flush();
  if (!f) throw ConfigError("failed while writing: " + path);
}

}  // namespace covercert

#endif
