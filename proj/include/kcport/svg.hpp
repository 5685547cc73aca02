#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace kcport {

struct ChartSeries
{
  std::string name;
  Eigen::VectorXd values; // y at x = 1..size()
};

/// Self-contained SVG line chart; long series are thinned to at most
/// `max_points` vertices.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           int max_points = 1500);

} // namespace kcport
