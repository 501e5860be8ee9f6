#pragma once

#include <string>
#include <vector>

namespace xiaudit {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Static SVG line plot. Coordinates are printed with fixed precision, so
/// identical data gives identical bytes. Throws DomainError when there is
/// nothing finite to draw.
std::string render_svg(const PlotData& plot);

}  // namespace xiaudit
