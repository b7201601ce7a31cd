#include "torqueid/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace torqueid::plot {
namespace {

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 300.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 45.0;
constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

void render_panel(std::ostringstream& out, const Panel& panel, double ox, double oy) {
  Range xr, yr;
  for (const auto& s : panel.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();

  const double left = ox + kMarginLeft, right = ox + kPanelWidth - kMarginRight;
  const double top = oy + kMarginTop, bottom = oy + kPanelHeight - kMarginBottom;
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left); };
  auto py = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - top); };

  out << "<g>\n";
  out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(oy + 18) << "\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(panel.title) << "</text>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right) << "\" y2=\"" << num(bottom)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(bottom)
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(bottom + 15) << "\" text-anchor=\"middle\" font-size=\"10\">"
        << tick(fx) << "</text>\n";
    out << "<text x=\"" << num(left - 5) << "\" y=\"" << num(py(fy) + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
        << tick(fy) << "</text>\n";
  }
  out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 35)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.x_label) << "</text>\n";
  out << "<text x=\"" << num(ox + 15) << "\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
      << " transform=\"rotate(-90 " << num(ox + 15) << ' ' << num((top + bottom) / 2) << ")\">" << escape(panel.y_label)
      << "</text>\n";

  for (std::size_t s = 0; s < panel.series.size(); ++s) {
    const Series& series = panel.series[s];
    const char* color = kColors[s % kColors.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(series.x.size(), series.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
      out << num(px(series.x[i])) << ',' << num(py(series.y[i])) << (i + 1 < n ? " " : "");
    }
    out << "\"/>\n";
    out << "<text x=\"" << num(right - 5) << "\" y=\"" << num(top + 12 + 14 * static_cast<double>(s))
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << escape(series.label) << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int columns) {
  columns = std::max(1, columns);
  const auto n = static_cast<int>(panels.size());
  const int rows = std::max(1, (n + columns - 1) / columns);
  const int cols = std::min(columns, std::max(1, n));
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(cols * kPanelWidth) << "\" height=\""
      << num(rows * kPanelHeight) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; i < n; ++i) {
    render_panel(out, panels[static_cast<std::size_t>(i)], (i % columns) * kPanelWidth, (i / columns) * kPanelHeight);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace torqueid::plot
