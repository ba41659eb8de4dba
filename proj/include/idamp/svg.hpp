#pragma once

#include <string>
#include <vector>

#include "idamp/common.hpp"

namespace idamp {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

// Log-log line plot. Non-positive samples are dropped.
std::string svg_loglog(const std::vector<PlotSeries>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel);

// Heatmap of log10(z), z(row, col) with rows along ys (upwards) and columns along xs.
std::string svg_heatmap(const RMatrix& z, const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& title);

}  // namespace idamp
