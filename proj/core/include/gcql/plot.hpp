#pragma once

#include <string>
#include <vector>

#include "gcql/csv.hpp"

namespace gcql {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  int width = 720;
  int height = 440;
};

// Standalone SVG with no external assets; identical inputs yield identical
// bytes. Empty data produces an axes-only plot and a warning on stderr.
std::string render_line_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);
std::string render_bar_svg(const std::vector<std::string>& labels,
                           const std::vector<double>& values, const PlotSpec& spec);

// Pulls (x_column, y_column[...]) series out of a CSV table; rows whose cells
// are empty are skipped. Missing columns raise an error naming the column.
std::vector<PlotSeries> series_from_csv(const CsvTable& t, const std::string& x_column,
                                        const std::vector<std::string>& y_columns);

void emit_plot(const CsvTable& csv, const std::string& x_column,
               const std::vector<std::string>& y_columns, const PlotSpec& spec,
               const std::string& out_path);

}  // namespace gcql
