#pragma once

#include "kcport/core.hpp"

#include <string>
#include <string_view>

namespace kcport {

enum class Density
{
  uniform,
  dirichlet_half,
};

Density parse_density(std::string_view name);
std::string_view to_string(Density density);

/// Lattice points of the simplex at pitch 1/divisions, lexicographically
/// sorted, with one prior weight per point.
struct PortfolioGrid
{
  Index assets = 0;
  Index divisions = 0;                    // 1 / step
  Eigen::MatrixXi counts;                 // integer compositions of `divisions`
  Eigen::MatrixXd points;                 // counts / divisions, one point per row
  Eigen::VectorXd weights;                // empty until grid_weights
  Eigen::VectorXd log_weights;

  Index size() const { return points.rows(); }
  double step() const { return 1.0 / static_cast<double>(divisions); }
  bool weighted() const { return weights.size() == points.rows(); }
};

/// Converts a pitch like 0.025 into its integer reciprocal.
/// Throws ValidationError("step must divide 1") otherwise.
Index divisions_for_step(double step);

/// C(divisions + m - 1, m - 1) as a double-free count.
Index composition_count(Index assets, Index divisions);

PortfolioGrid generate_grid(Index assets, Index divisions);
PortfolioGrid generate_grid_for_step(Index assets, double step);

PortfolioGrid grid_weights(PortfolioGrid grid, Density density);

/// Convenience for generate + weight.
PortfolioGrid make_grid(Index assets, double step, Density density);

/// One point per row, weight last. Debugging aid only.
std::string grid_csv(const PortfolioGrid& grid);

} // namespace kcport
