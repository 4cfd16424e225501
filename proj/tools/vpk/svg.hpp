#pragma once

#include <string>
#include <vector>

namespace vpkcli {

struct Series {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  double width = 1.5;
  bool markers = false;
};

// Minimal self-contained SVG line plot: auto-ranged axes, decade ticks on
// logarithmic scales, no external assets.
struct SvgPlot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;

  // atomic: writes to a temporary and renames into place
  void save(const std::string& path) const;
};

} // namespace vpkcli
