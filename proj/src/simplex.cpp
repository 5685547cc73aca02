#include "kcport/simplex.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace kcport {

Density parse_density(std::string_view name)
{
  if (name == "uniform")
    return Density::uniform;
  if (name == "dirichlet_half" || name == "dirichlet")
    return Density::dirichlet_half;
  throw ValidationError(fmt::format("unknown density '{}'", name));
}

std::string_view to_string(Density density)
{
  return density == Density::uniform ? "uniform" : "dirichlet_half";
}

Index divisions_for_step(double step)
{
  if (!(step > 0.0) || step > 1.0 || !std::isfinite(step))
    throw ValidationError("step must divide 1");
  const double reciprocal = 1.0 / step;
  const double rounded = std::round(reciprocal);
  if (std::abs(rounded * step - 1.0) > 1e-9 || rounded < 1.0)
    throw ValidationError("step must divide 1");
  return static_cast<Index>(rounded);
}

Index composition_count(Index assets, Index divisions)
{
  // C(divisions + assets - 1, assets - 1), built so every partial product is
  // itself a binomial coefficient.
  Index count = 1;
  for (Index j = 1; j < assets; ++j) {
    if (count > std::numeric_limits<Index>::max() / (divisions + j))
      throw ValidationError("grid too large");
    count = count * (divisions + j) / j;
  }
  return count;
}

PortfolioGrid generate_grid(Index assets, Index divisions)
{
  if (assets < 2)
    throw ValidationError("grid needs at least two assets");
  if (divisions < 1)
    throw ValidationError("step must divide 1");

  PortfolioGrid grid;
  grid.assets = assets;
  grid.divisions = divisions;
  const Index count = composition_count(assets, divisions);
  grid.counts.resize(count, assets);

  // Lexicographic enumeration of compositions: odometer over the first m-1
  // coordinates, the last one absorbs the remainder.
  Eigen::VectorXi current = Eigen::VectorXi::Zero(assets);
  current(assets - 1) = static_cast<int>(divisions);
  for (Index row = 0; row < count; ++row) {
    grid.counts.row(row) = current.transpose();
    // Advance: find rightmost position p < m-1 that can be incremented.
    Index p = assets - 2;
    for (; p >= 0; --p) {
      int prefix = 0;
      for (Index j = 0; j <= p; ++j)
        prefix += current(j);
      if (prefix < divisions)
        break;
    }
    if (p < 0)
      break;
    ++current(p);
    for (Index j = p + 1; j < assets; ++j)
      current(j) = 0;
    current(assets - 1) = static_cast<int>(divisions - current.head(assets - 1).sum());
  }

  grid.points = grid.counts.cast<double>() / static_cast<double>(divisions);
  return grid;
}

PortfolioGrid generate_grid_for_step(Index assets, double step)
{
  return generate_grid(assets, divisions_for_step(step));
}

PortfolioGrid grid_weights(PortfolioGrid grid, Density density)
{
  const Index count = grid.size();
  if (count < 1)
    throw ValidationError("grid has no points");

  if (density == Density::uniform) {
    grid.weights = Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count));
    grid.log_weights = Eigen::VectorXd::Constant(count, -std::log(static_cast<double>(count)));
    return grid;
  }

  // Dirichlet(1/2) blows up on the boundary, where lattice points live; the
  // density is evaluated at the point pulled toward the centroid by one step.
  const double eps = grid.step();
  const double centroid = 1.0 / static_cast<double>(grid.assets);
  Eigen::VectorXd log_density(count);
  for (Index g = 0; g < count; ++g) {
    const Eigen::ArrayXd shrunk = (1.0 - eps) * grid.points.row(g).transpose().array() + eps * centroid;
    log_density(g) = -0.5 * shrunk.log().sum();
  }
  const double normalizer = log_sum_exp(log_density);
  grid.log_weights = log_density.array() - normalizer;
  grid.weights = grid.log_weights.array().exp();
  return grid;
}

PortfolioGrid make_grid(Index assets, double step, Density density)
{
  return grid_weights(generate_grid_for_step(assets, step), density);
}

std::string grid_csv(const PortfolioGrid& grid)
{
  std::string out;
  for (Index j = 0; j < grid.assets; ++j)
    out += fmt::format("b{},", j + 1);
  out += "weight\n";
  for (Index g = 0; g < grid.size(); ++g) {
    for (Index j = 0; j < grid.assets; ++j)
      out += full_precision(grid.points(g, j)) + ",";
    out += (grid.weighted() ? full_precision(grid.weights(g)) : std::string("nan")) + "\n";
  }
  return out;
}

} // namespace kcport
