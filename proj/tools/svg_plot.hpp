#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nsn::runner {

struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool markers_only = false;
};

// Minimal line chart; output is never parsed back.
std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace nsn::runner
