#include "svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nsn::runner {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kMargin = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<PlotSeries>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
     << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
     << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4;
    const double yv = y0 + (y1 - y0) * t / 4;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << kHeight - kMargin + 16
       << "\" text-anchor=\"middle\">" << label(xv) << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
       << label(yv) << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">" << x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
     << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";

  int legend_row = 0;
  for (const auto& s : series) {
    if (s.markers_only) {
      for (const auto& [x, y] : s.points) {
        os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"5\" fill=\"" << s.color
           << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) os << num(px(x)) << "," << num(py(y)) << " ";
      os << "\"/>\n";
    }
    const double ly = kMargin + 14 * legend_row++;
    os << "<rect x=\"" << kWidth - kMargin - 110 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << s.color << "\"/>\n";
    os << "<text x=\"" << kWidth - kMargin - 95 << "\" y=\"" << ly << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace nsn::runner
