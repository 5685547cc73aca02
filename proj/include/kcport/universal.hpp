#pragma once

#include "kcport/core.hpp"
#include "kcport/simplex.hpp"

#include <memory>
#include <string>

namespace kcport {

/// Running per-grid-point log wealth of every constant rebalanced portfolio
/// on the observations fed so far; the prior lives in the shared grid.
class UpState
{
public:
  explicit UpState(std::shared_ptr<const PortfolioGrid> grid);

  const PortfolioGrid& grid() const { return *grid_; }
  const std::shared_ptr<const PortfolioGrid>& shared_grid() const { return grid_; }
  const Eigen::VectorXd& log_wealth() const { return log_wealth_; }
  Index observations() const { return observations_; }

  /// Adds log<b, x> to every grid point's log wealth.
  void observe(const Eigen::Ref<const Eigen::RowVectorXd>& x);

private:
  std::shared_ptr<const PortfolioGrid> grid_;
  Eigen::VectorXd log_wealth_;
  Index observations_ = 0;
};

/// Wealth-weighted mean of the grid points under the prior. Uses shifted
/// exponentials so the ratio is exact even when wealths span hundreds of
/// orders of magnitude.
Portfolio up_portfolio(const UpState& state);

UpState up_observe(UpState state, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// log sum_g w_g S(b_g): the log wealth of the mixture over the grid.
double mixture_log_wealth(const UpState& state);

/// k-parallel Universal Portfolio. Period kt+i holds the uniform portfolio
/// when t = 0 and otherwise the UP portfolio of the i-th cyclic subsequence
/// observed so far. k = 1 is the plain Universal Portfolio.
StrategyTrace run_kpup(const ReturnsSequence& returns, Index k,
                       std::shared_ptr<const PortfolioGrid> grid);
StrategyTrace run_kpup(const ReturnsSequence& returns, Index k, const PortfolioGrid& grid);

/// period,<symbols...>,period_return,log_wealth at full precision.
std::string trace_csv(const StrategyTrace& trace, const std::vector<std::string>& symbols);

} // namespace kcport
