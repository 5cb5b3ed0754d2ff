#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace fluxband {
namespace svg {

/// One polyline: x and y in data coordinates, same length.
struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f6fb2";
};

/// One framed chart: several series sharing an axis box.
struct Panel {
  std::vector<Series> series;
  std::string x_label;
  std::string y_label;
  std::string title;
};

namespace detail {

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) {
      lo = -1.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

/// Render panels stacked vertically into a standalone SVG document.
/// Straight segments between data points, no smoothing.
inline std::string render_panels(const std::vector<Panel>& panels, int width = 640,
                                 int panel_height = 300) {
  const int margin_l = 64, margin_r = 16, margin_t = 34, margin_b = 42;
  const int total_h = panel_height * static_cast<int>(panels.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << total_h << "\" viewBox=\"0 0 " << width << ' ' << total_h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    detail::Extent ex, ey;
    for (const Series& s : panel.series)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        ex.add(s.x[i]);
        ey.add(s.y[i]);
      }
    ex.pad();
    ey.pad();

    const double top = pi * panel_height + margin_t;
    const double bottom = (pi + 1) * panel_height - margin_b;
    const double left = margin_l, right = width - margin_r;
    const auto px = [&](double v) {
      return left + (v - ex.lo) / (ex.hi - ex.lo) * (right - left);
    };
    const auto py = [&](double v) {
      return bottom - (v - ey.lo) / (ey.hi - ey.lo) * (bottom - top);
    };

    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
       << "\" height=\"" << bottom - top
       << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    if (!panel.title.empty())
      os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << top - 12
         << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">"
         << panel.title << "</text>\n";

    // min/mid/max ticks on both axes
    for (double f : {0.0, 0.5, 1.0}) {
      const double xv = ex.lo + f * (ex.hi - ex.lo);
      const double yv = ey.lo + f * (ey.hi - ey.lo);
      os << "<text x=\"" << px(xv) << "\" y=\"" << bottom + 16
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
         << detail::num(xv) << "</text>\n";
      os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
         << detail::num(yv) << "</text>\n";
    }
    if (!panel.x_label.empty())
      os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 34
         << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
         << panel.x_label << "</text>\n";
    if (!panel.y_label.empty())
      os << "<text x=\"14\" y=\"" << (top + bottom) / 2
         << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
         << " transform=\"rotate(-90 14 " << (top + bottom) / 2 << ")\">" << panel.y_label
         << "</text>\n";

    for (const Series& s : panel.series) {
      if (s.x.empty()) continue;
      os << "<polyline fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << detail::num(px(s.x[i])) << ',' << detail::num(py(s.y[i])) << ' ';
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

/// Column-by-row heatmap (columns = x samples, rows = y samples, row 0 drawn
/// at the bottom).  Values are mapped linearly onto a dark-to-bright ramp.
inline std::string render_heatmap(const std::vector<std::vector<double>>& columns,
                                  const std::string& x_label, const std::string& y_label,
                                  const std::string& title, int width = 720,
                                  int height = 360) {
  const int margin_l = 56, margin_r = 16, margin_t = 30, margin_b = 40;
  const int cols = static_cast<int>(columns.size());
  const int rows = cols ? static_cast<int>(columns[0].size()) : 0;
  double vmax = 0.0;
  for (const auto& col : columns)
    for (double v : col) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;

  const double left = margin_l, right = width - margin_r;
  const double top = margin_t, bottom = height - margin_b;
  const double cw = (right - left) / std::max(1, cols);
  const double ch = (bottom - top) / std::max(1, rows);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    os << "<text x=\"" << (left + right) / 2 << "\" y=\"18\" font-family=\"sans-serif\""
       << " font-size=\"14\" text-anchor=\"middle\">" << title << "</text>\n";

  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rows; ++j) {
      const double f = std::clamp(columns[i][j] / vmax, 0.0, 1.0);
      const int rr = static_cast<int>(20 + 215 * f);
      const int gg = static_cast<int>(24 + 140 * f * f);
      const int bb = static_cast<int>(60 + 40 * (1.0 - f));
      os << "<rect x=\"" << detail::num(left + i * cw) << "\" y=\""
         << detail::num(bottom - (j + 1) * ch) << "\" width=\"" << detail::num(cw + 0.5)
         << "\" height=\"" << detail::num(ch + 0.5) << "\" fill=\"rgb(" << rr << ',' << gg
         << ',' << bb << ")\"/>\n";
    }

  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
     << "\" height=\"" << bottom - top
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  if (!x_label.empty())
    os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 10
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << x_label
       << "</text>\n";
  if (!y_label.empty())
    os << "<text x=\"14\" y=\"" << (top + bottom) / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
       << " transform=\"rotate(-90 14 " << (top + bottom) / 2 << ")\">" << y_label
       << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace svg
}  // namespace fluxband
