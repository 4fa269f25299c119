#include "gcql/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace gcql {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Frame {
  double x0, y0, x1, y1;  // data bounds
  double left, top, right, bottom;  // pixel box
  double sx(double x) const { return left + (x - x0) / (x1 - x0) * (right - left); }
  double sy(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

void open_svg(std::ostringstream& out, const PlotSpec& spec) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, const PlotSpec& spec) {
  out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(f.bottom) << "\" x2=\"" << px(f.right)
      << "\" y2=\"" << px(f.bottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(f.top) << "\" x2=\"" << px(f.left)
      << "\" y2=\"" << px(f.bottom) << "\" stroke=\"black\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = f.x0 + (f.x1 - f.x0) * i / ticks;
    double fy = f.y0 + (f.y1 - f.y0) * i / ticks;
    double sx = f.sx(fx), sy = f.sy(fy);
    out << "<line x1=\"" << px(sx) << "\" y1=\"" << px(f.bottom) << "\" x2=\"" << px(sx)
        << "\" y2=\"" << px(f.bottom + 4) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(sx) << "\" y=\"" << px(f.bottom + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << tick_label(fx) << "</text>\n";
    out << "<line x1=\"" << px(f.left - 4) << "\" y1=\"" << px(sy) << "\" x2=\"" << px(f.left)
        << "\" y2=\"" << px(sy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(f.left - 6) << "\" y=\"" << px(sy + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << tick_label(fy) << "</text>\n";
  }
  if (!spec.xlabel.empty())
    out << "<text x=\"" << px((f.left + f.right) / 2) << "\" y=\"" << px(f.bottom + 32)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << spec.xlabel << "</text>\n";
  if (!spec.ylabel.empty())
    out << "<text x=\"14\" y=\"" << px((f.top + f.bottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << px((f.top + f.bottom) / 2) << ")\">" << spec.ylabel
        << "</text>\n";
}

}  // namespace

std::string render_line_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
  std::ostringstream out;
  open_svg(out, spec);
  Frame f{0, 0, 1, 1,
          52.0, 32.0, spec.width - 16.0, spec.height - 44.0};

  bool any = false;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!any) {
        x0 = x1 = s.x[i];
        y0 = y1 = s.y[i];
        any = true;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!any) {
    std::cerr << "render_line_svg: warning: no data rows, emitting axes only\n";
  } else {
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    f.x0 = x0;
    f.x1 = x1;
    f.y0 = y0;
    f.y1 = y1;
  }
  draw_axes(out, f, spec);
  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.x.empty()) continue;
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << px(f.sx(s.x[i])) << ',' << px(f.sy(s.y[i]));
    }
    out << "\"/>\n";
    double ly = 36.0 + 14.0 * static_cast<double>(si);
    out << "<line x1=\"" << px(f.right - 120) << "\" y1=\"" << px(ly) << "\" x2=\""
        << px(f.right - 100) << "\" y2=\"" << px(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << px(f.right - 96) << "\" y=\"" << px(ly + 3)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_bar_svg(const std::vector<std::string>& labels,
                           const std::vector<double>& values, const PlotSpec& spec) {
  if (labels.size() != values.size())
    throw std::invalid_argument("render_bar_svg: labels/values size mismatch");
  std::ostringstream out;
  open_svg(out, spec);
  Frame f{0, 0, 1, 1, 52.0, 32.0, spec.width - 16.0, spec.height - 44.0};
  double vmax = 1.0;
  for (double v : values) vmax = std::max(vmax, v);
  f.y1 = vmax;
  if (values.empty()) std::cerr << "render_bar_svg: warning: no bars, emitting axes only\n";
  draw_axes(out, f, spec);
  const double n = static_cast<double>(std::max<size_t>(values.size(), 1));
  const double slot = (f.right - f.left) / n;
  for (size_t i = 0; i < values.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    double x = f.left + slot * static_cast<double>(i) + slot * 0.15;
    double w = slot * 0.7;
    double y = f.sy(values[i]);
    out << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(w)
        << "\" height=\"" << px(f.bottom - y) << "\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << px(x + w / 2) << "\" y=\"" << px(f.bottom + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << labels[i]
        << "</text>\n";
    out << "<text x=\"" << px(x + w / 2) << "\" y=\"" << px(y - 4)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << tick_label(values[i]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<PlotSeries> series_from_csv(const CsvTable& t, const std::string& x_column,
                                        const std::vector<std::string>& y_columns) {
  int xi = t.column_index(x_column);
  if (xi < 0) throw std::invalid_argument("series_from_csv: no column named '" + x_column + "'");
  std::vector<PlotSeries> out;
  for (const auto& yc : y_columns) {
    int yi = t.column_index(yc);
    if (yi < 0) throw std::invalid_argument("series_from_csv: no column named '" + yc + "'");
    PlotSeries s;
    s.label = yc;
    for (const auto& row : t.rows) {
      const std::string& xs = row[static_cast<size_t>(xi)];
      const std::string& ys = row[static_cast<size_t>(yi)];
      if (xs.empty() || ys.empty()) continue;
      s.x.push_back(std::stod(xs));
      s.y.push_back(std::stod(ys));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void emit_plot(const CsvTable& csv, const std::string& x_column,
               const std::vector<std::string>& y_columns, const PlotSpec& spec,
               const std::string& out_path) {
  std::string svg = render_line_svg(series_from_csv(csv, x_column, y_columns), spec);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + out_path);
  out << svg;
  if (!out) throw std::runtime_error("emit_plot: write failed for " + out_path);
}

}  // namespace gcql
