#pragma once

#include <string>
#include <vector>

namespace gcql {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};

// Shortest round-trip decimal form; the same value always prints the same
// bytes, which keeps metrics files reproducible.
std::string format_double(double v);

void write_csv(const CsvTable& t, const std::string& path);
CsvTable read_csv(const std::string& path);

}  // namespace gcql
