// Static SVG line plots of diagnostics time series.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kflow/io.hpp"

namespace kflow::plot {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Figure {
  std::string title;
  std::string xlabel = "t";
  std::string ylabel;
  bool log_y = false;
  std::vector<Series> series;
};

/// Non-finite points are skipped, as are non-positive ones on a log axis.
std::string render_svg(const Figure& figure);

/// (file name, svg) for one figure per CSV quantity plus the overview
/// figures u.svg, volume.svg and estimates.svg. Throws std::invalid_argument
/// if a required column is missing.
std::vector<std::pair<std::string, std::string>> figures_from_csv(const io::CsvTable& table);

}  // namespace kflow::plot
