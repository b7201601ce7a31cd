#pragma once

#include <string>
#include <vector>

namespace torqueid::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Grid of line-chart panels; each series is one <polyline>.
std::string render_svg(const std::vector<Panel>& panels, int columns = 1);

}  // namespace torqueid::plot
