#pragma once

#include "kcport/core.hpp"
#include "kcport/simplex.hpp"

#include <string>
#include <vector>

namespace kcport {

/// Best grid point for a block of return rows.
struct CrpOptimum
{
  Portfolio portfolio;
  double log_wealth = 0.0;
  Index grid_index = -1;
};

/// Grid argmax of sum_t log<b, x_t>; ties go to the lexicographically
/// smallest point.
///
/// Per-point log wealths are accumulated in 64.64 fixed point, which makes
/// the sums associative: splitting a sequence into subsequences and adding
/// the parts gives bit-identical totals, so benchmark comparisons across
/// cycle lengths are exact.
CrpOptimum best_crp(const ReturnsSequence& returns, const PortfolioGrid& grid);
CrpOptimum best_crp_rows(const Eigen::MatrixXd& rows, const PortfolioGrid& grid);

struct OptimizeResult
{
  Portfolio portfolio;
  double objective = 0.0;
  double gap = 0.0; // Frank-Wolfe gap at the returned point
  Index iterations = 0;
};

/// Maximizes sum_s weights_s log<b, rows_s> over the simplex.
///
/// Projected gradient ascent with backtracking (step halved until ascent,
/// floor 1e-16) runs until the per-step improvement drops below `tol`; a
/// Newton polish on the active face then drives the duality gap down. The
/// result never has a lower objective than `initial`.
OptimizeResult maximize_log_objective(const Eigen::MatrixXd& rows,
                                      const Eigen::VectorXd& weights,
                                      const Portfolio& initial, double tol);

/// Continuum refinement of a constant rebalanced portfolio for the average
/// log return (1/n) sum_t log<b, x_t>.
Portfolio refine_crp(const ReturnsSequence& returns, const Portfolio& initial, double tol);

/// Best k-cyclic constant strategy in hindsight, one optimum per cyclic
/// subsequence. Empty subsequences hold the uniform portfolio and add 0.
struct KccBenchmark
{
  Index cycle = 1;
  std::vector<Portfolio> portfolios;
  Eigen::VectorXd subsequence_log_wealth;
  double log_wealth = 0.0;
};

KccBenchmark best_kcc(const ReturnsSequence& returns, Index k, const PortfolioGrid& grid,
                      bool refine = false, double refine_tol = 1e-10);

/// Grid-level best k-CC log wealth for every prefix x_1..x_n, n = 1..N.
Eigen::VectorXd best_kcc_path(const ReturnsSequence& returns, Index k, const PortfolioGrid& grid);

/// Trace of the k-cyclic constant strategy looping over `portfolios`.
StrategyTrace run_kcc(const ReturnsSequence& returns, const std::vector<Portfolio>& portfolios);

/// Worst-case log-wealth regret bound of the k-parallel Universal Portfolio
/// against the best k-CC after n periods.
double regret_bound(Index k, Index m, Index n, Density density);

/// Growth-rate regret W_n(benchmark) - W_n(strategy) against bound(n)/n.
struct RegretSeries
{
  Eigen::VectorXd regret;
  Eigen::VectorXd bound;
  Eigen::VectorXd ratio;
  Index violations = 0;
};

RegretSeries check_consistency(const StrategyTrace& trace, const Eigen::VectorXd& benchmark_log_wealth,
                               Index k, Index m, Density density);

std::string regret_csv(const RegretSeries& series);
std::string benchmark_csv(const KccBenchmark& benchmark, const std::vector<std::string>& symbols);

} // namespace kcport
