#pragma once

#include <string>
#include <utility>
#include <vector>

namespace osc {

inline constexpr const char* kToolVersion = "0.1.0";

// Layout: "# key = value" metadata lines, one header line, data rows, then "# rows = N" closing the file.
// Extra "# key = value" lines after the rows are footer entries (fit summaries and the like).
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> footer;

  int column(const std::string& name) const;  // -1 when absent
  std::string meta_value(const std::string& key) const;
  std::string footer_value(const std::string& key) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

// Shortest text that reads back to the same double.
std::string fmt(double x);

std::string render_csv(const CsvTable& t);
// Throws SchemaError on a missing header, ragged rows or a missing row-count line.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// SchemaError listing every absent column.
void require_columns(const CsvTable& t, const std::vector<std::string>& columns);

// Writes to path.tmp then renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string sha256_hex(const std::string& data);

}  // namespace osc
