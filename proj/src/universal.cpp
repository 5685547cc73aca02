#include "kcport/universal.hpp"

#include "kcport/parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace kcport {

UpState::UpState(std::shared_ptr<const PortfolioGrid> grid) : grid_(std::move(grid))
{
  if (!grid_ || !grid_->weighted())
    throw ValidationError("UpState needs a grid with weights");
  log_wealth_ = Eigen::VectorXd::Zero(grid_->size());
}

void UpState::observe(const Eigen::Ref<const Eigen::RowVectorXd>& x)
{
  if (x.size() != grid_->assets)
    throw ValidationError("return row length does not match the grid");
  for (Index j = 0; j < x.size(); ++j)
    if (!(x(j) > 0.0) || !std::isfinite(x(j)))
      throw ValidationError("returns must be strictly positive");

  const Eigen::VectorXd xt = x.transpose();
  for_each_chunk(grid_->size(), [&](Index, Index begin, Index end) {
    const Index len = end - begin;
    log_wealth_.segment(begin, len).array() +=
        (grid_->points.middleRows(begin, len) * xt).array().log();
  });
  ++observations_;
}

Portfolio up_portfolio(const UpState& state)
{
  const auto& grid = state.grid();
  const Eigen::VectorXd log_mass = grid.log_weights + state.log_wealth();
  const double top = log_mass.maxCoeff();

  const Index chunks = chunk_count(grid.size());
  Eigen::MatrixXd numerators(grid.assets, chunks);
  Eigen::VectorXd denominators(chunks);
  for_each_chunk(grid.size(), [&](Index c, Index begin, Index end) {
    const Index len = end - begin;
    const Eigen::VectorXd mass = (log_mass.segment(begin, len).array() - top).exp();
    numerators.col(c) = grid.points.middleRows(begin, len).transpose() * mass;
    denominators(c) = mass.sum();
  });

  Portfolio numerator = Portfolio::Zero(grid.assets);
  double denominator = 0.0;
  for (Index c = 0; c < chunks; ++c) {
    numerator += numerators.col(c);
    denominator += denominators(c);
  }
  Portfolio b = numerator / denominator;
  return b / b.sum();
}

UpState up_observe(UpState state, const Eigen::Ref<const Eigen::RowVectorXd>& x)
{
  state.observe(x);
  return state;
}

double mixture_log_wealth(const UpState& state)
{
  return log_sum_exp(state.grid().log_weights + state.log_wealth());
}

StrategyTrace run_kpup(const ReturnsSequence& returns, Index k,
                       std::shared_ptr<const PortfolioGrid> grid)
{
  if (k < 1)
    throw ValidationError("cycle length must be at least 1");
  if (!grid || !grid->weighted())
    throw ValidationError("grid weights must be populated");
  if (grid->assets != returns.assets())
    throw ValidationError("grid dimension does not match the asset count");

  const Index n = returns.periods();
  const Index m = returns.assets();
  std::vector<UpState> states(static_cast<std::size_t>(std::min(k, std::max<Index>(n, 1))),
                              UpState(grid));
  Eigen::MatrixXd portfolios(n, m);
  const Portfolio uniform = uniform_portfolio<double>(m);
  for (Index t = 0; t < n; ++t) {
    if (t < k) {
      portfolios.row(t) = uniform.transpose();
    } else {
      portfolios.row(t) = up_portfolio(states[static_cast<std::size_t>(t % k)]).transpose();
    }
    states[static_cast<std::size_t>(t % k)].observe(returns.row(t));
  }
  return make_trace(returns, std::move(portfolios));
}

StrategyTrace run_kpup(const ReturnsSequence& returns, Index k, const PortfolioGrid& grid)
{
  return run_kpup(returns, k, std::make_shared<const PortfolioGrid>(grid));
}

std::string trace_csv(const StrategyTrace& trace, const std::vector<std::string>& symbols)
{
  std::string out = "period";
  for (const auto& s : symbols)
    out += "," + s;
  out += ",period_return,log_wealth\n";
  for (Index t = 0; t < trace.periods(); ++t) {
    out += std::to_string(t + 1);
    for (Index j = 0; j < trace.portfolios.cols(); ++j)
      out += "," + full_precision(trace.portfolios(t, j));
    out += "," + full_precision(trace.period_returns(t)) + ","
           + full_precision(trace.log_wealth(t)) + "\n";
  }
  return out;
}

} // namespace kcport
