#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace linkprof {

// Minimal polyline plot: axes, ticks, one or more series. CSV is the
// normative output; this exists for quick visual checks.
struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

inline std::string render_svg_plot(const std::vector<SvgSeries>& series,
                                   const std::string& x_label,
                                   const std::string& y_label,
                                   const std::string& title) {
  const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
     << "' viewBox='0 0 " << w << ' ' << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>"
     << title << "</text>\n";
  // axes
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='"
     << h - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
     << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x='" << px(xv) << "' y='" << h - mb + 18
       << "' text-anchor='middle' font-size='11'>" << std::round(xv * 100) / 100
       << "</text>\n";
    os << "<text x='" << ml - 8 << "' y='" << py(yv) + 4
       << "' text-anchor='end' font-size='11'>" << std::round(yv * 100) / 100
       << "</text>\n";
    os << "<line x1='" << px(xv) << "' y1='" << h - mb << "' x2='" << px(xv) << "' y2='"
       << h - mb + 4 << "' stroke='black'/>\n";
  }
  os << "<text x='" << w / 2 << "' y='" << h - 12
     << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  os << "<text x='16' y='" << h / 2 << "' text-anchor='middle' font-size='13' "
     << "transform='rotate(-90 16 " << h / 2 << ")'>" << y_label << "</text>\n";
  int li = 0;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5'";
    if (s.dashed) os << " stroke-dasharray='6,4'";
    os << " points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "'/>\n";
    os << "<text x='" << w - mr - 8 << "' y='" << mt + 16 * (li + 1)
       << "' text-anchor='end' font-size='12' fill='" << s.color << "'>" << s.label
       << "</text>\n";
    ++li;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace linkprof
