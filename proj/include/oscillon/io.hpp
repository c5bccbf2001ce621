#pragma once

#include <string>
#include <vector>

namespace oscillon {

inline constexpr int kCsvSchemaVersion = 1;

/// Writes `content` to `path` via a sibling temporary file and rename, so
/// readers never see a partial file.
void atomic_write(const std::string& path, const std::string& content);

/// %.17g, which round-trips every double.
std::string format_number(double x);

/// Flat numeric table. The first line is "# schema=<v> <comment>", the second
/// the column header.
struct CsvTable {
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string render() const;
  void write(const std::string& path) const { atomic_write(path, render()); }
};

} // namespace oscillon
