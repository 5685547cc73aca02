#include "kcport/hindsight.hpp"

#include "kcport/market_data.hpp"
#include "kcport/parallel.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace kcport {
namespace {

__extension__ typedef __int128 Fixed;
constexpr int kFixedBits = 64;

Fixed to_fixed(double v)
{
  return static_cast<Fixed>(std::ldexp(v, kFixedBits));
}

double from_fixed(Fixed v)
{
  return std::ldexp(static_cast<double>(v), -kFixedBits);
}

using FixedVector = std::vector<Fixed>;

void accumulate_row(FixedVector& acc, const PortfolioGrid& grid,
                    const Eigen::Ref<const Eigen::RowVectorXd>& x)
{
  const Eigen::VectorXd xt = x.transpose();
  for_each_chunk(grid.size(), [&](Index, Index begin, Index end) {
    const Index len = end - begin;
    const Eigen::VectorXd gross = grid.points.middleRows(begin, len) * xt;
    for (Index g = 0; g < len; ++g)
      acc[static_cast<std::size_t>(begin + g)] += to_fixed(std::log(gross(g)));
  });
}

// Lowest index attaining the maximum.
std::pair<Index, Fixed> argmax(const FixedVector& acc)
{
  Index best = 0;
  for (Index g = 1; g < static_cast<Index>(acc.size()); ++g)
    if (acc[static_cast<std::size_t>(g)] > acc[static_cast<std::size_t>(best)])
      best = g;
  return {best, acc[static_cast<std::size_t>(best)]};
}

std::pair<Index, Fixed> best_fixed(const Eigen::MatrixXd& rows, const PortfolioGrid& grid)
{
  FixedVector acc(static_cast<std::size_t>(grid.size()), 0);
  for (Index t = 0; t < rows.rows(); ++t)
    accumulate_row(acc, grid, rows.row(t));
  return argmax(acc);
}

void require_positive_rows(const Eigen::MatrixXd& rows)
{
  if (!(rows.array() > 0.0).all() || !rows.allFinite())
    throw ValidationError("returns must be strictly positive");
}

double objective(const Eigen::MatrixXd& rows, const Eigen::VectorXd& weights, const Portfolio& b)
{
  return log_objective(rows, weights, b);
}

// Newton step on the face spanned by the support of b (plus any coordinate
// whose partial derivative beats the current return). Returns b unchanged
// when the KKT system is singular or no step is possible.
Portfolio newton_step(const Eigen::MatrixXd& rows, const Eigen::VectorXd& weights,
                      const Portfolio& b, const Portfolio& gradient)
{
  const Index m = b.size();
  const double level = gradient.dot(b);
  std::vector<Index> face;
  for (Index j = 0; j < m; ++j)
    if (b(j) > 0.0 || gradient(j) > level)
      face.push_back(j);
  const auto s = static_cast<Index>(face.size());
  if (s < 2)
    return b;

  const Eigen::VectorXd gross = rows * b;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  for (Index r = 0; r < rows.rows(); ++r) {
    const double scale = weights(r) / (gross(r) * gross(r));
    for (Index a = 0; a < s; ++a)
      for (Index c = 0; c < s; ++c)
        kkt(a, c) -= scale * rows(r, face[static_cast<std::size_t>(a)])
                     * rows(r, face[static_cast<std::size_t>(c)]);
  }
  for (Index a = 0; a < s; ++a) {
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
    rhs(a) = -gradient(face[static_cast<std::size_t>(a)]);
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible())
    return b;
  const Eigen::VectorXd solution = lu.solve(rhs);

  double alpha = 1.0;
  Index blocking = -1;
  for (Index a = 0; a < s; ++a) {
    const Index j = face[static_cast<std::size_t>(a)];
    const double d = solution(a);
    if (d < 0.0 && b(j) + alpha * d < 0.0) {
      alpha = -b(j) / d;
      blocking = j;
    }
  }
  if (!(alpha > 0.0))
    return b;

  Portfolio next = b;
  for (Index a = 0; a < s; ++a)
    next(face[static_cast<std::size_t>(a)]) += alpha * solution(a);
  if (blocking >= 0)
    next(blocking) = 0.0;
  next = next.cwiseMax(0.0);
  return next / next.sum();
}

} // namespace

CrpOptimum best_crp_rows(const Eigen::MatrixXd& rows, const PortfolioGrid& grid)
{
  if (rows.rows() < 1)
    throw ValidationError("empty sequence");
  if (rows.cols() != grid.assets)
    throw ValidationError("grid dimension does not match the asset count");
  require_positive_rows(rows);
  const auto [index, value] = best_fixed(rows, grid);
  return {grid.points.row(index).transpose(), from_fixed(value), index};
}

CrpOptimum best_crp(const ReturnsSequence& returns, const PortfolioGrid& grid)
{
  return best_crp_rows(returns.values(), grid);
}

OptimizeResult maximize_log_objective(const Eigen::MatrixXd& rows,
                                      const Eigen::VectorXd& weights,
                                      const Portfolio& initial, double tol)
{
  if (!(tol > 0.0))
    throw ValidationError("tolerance must be positive");
  if (rows.rows() != weights.size() || rows.cols() != initial.size())
    throw ValidationError("objective dimensions do not agree");
  require_portfolio(initial, "initial portfolio");
  require_positive_rows(rows);

  OptimizeResult result;
  Portfolio b = initial;
  double f = objective(rows, weights, b);
  if (!std::isfinite(f))
    throw std::runtime_error("non-finite objective");

  constexpr Index kMaxIterations = 100000;
  double step = 1.0;
  Index iter = 0;
  Portfolio g = log_objective_gradient(rows, weights, b);
  for (; iter < kMaxIterations; ++iter) {
    if (simplex_gap(g, b) <= 0.0)
      break;
    double s = std::min(step * 4.0, 1e8);
    bool accepted = false;
    Portfolio candidate;
    double fc = f;
    for (; s >= 1e-16; s *= 0.5) {
      candidate = project_to_simplex(b + s * g);
      fc = objective(rows, weights, candidate);
      if (fc > f) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      break;
    const double improvement = fc - f;
    b = candidate;
    f = fc;
    step = s;
    g = log_objective_gradient(rows, weights, b);
    if (improvement < tol)
      break;
  }

  // Polish: Newton iterations accepted while the duality gap shrinks without
  // losing objective beyond rounding.
  double gap = simplex_gap(g, b);
  for (Index polish = 0; polish < 100 && gap > 0.0; ++polish, ++iter) {
    const Portfolio candidate = newton_step(rows, weights, b, g);
    if (candidate == b)
      break;
    const double fc = objective(rows, weights, candidate);
    const Portfolio gc = log_objective_gradient(rows, weights, candidate);
    const double gap_c = simplex_gap(gc, candidate);
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
    if (!(gap_c < gap) || fc < f - slack)
      break;
    b = candidate;
    f = fc;
    g = gc;
    gap = gap_c;
  }

  // Never hand back something worse than the start.
  const double f0 = objective(rows, weights, initial);
  if (f < f0) {
    b = initial;
    f = f0;
    g = log_objective_gradient(rows, weights, b);
    gap = simplex_gap(g, b);
  }

  result.portfolio = b;
  result.objective = f;
  result.gap = gap;
  result.iterations = iter;
  return result;
}

Portfolio refine_crp(const ReturnsSequence& returns, const Portfolio& initial, double tol)
{
  if (returns.periods() < 1)
    throw ValidationError("empty sequence");
  const Eigen::VectorXd weights =
      Eigen::VectorXd::Constant(returns.periods(), 1.0 / static_cast<double>(returns.periods()));
  return maximize_log_objective(returns.values(), weights, initial, tol).portfolio;
}

KccBenchmark best_kcc(const ReturnsSequence& returns, Index k, const PortfolioGrid& grid,
                      bool refine, double refine_tol)
{
  if (grid.assets != returns.assets())
    throw ValidationError("grid dimension does not match the asset count");
  const auto parts = decompose(returns, k);

  KccBenchmark out;
  out.cycle = k;
  out.subsequence_log_wealth = Eigen::VectorXd::Zero(k);
  Fixed total = 0;
  for (Index i = 0; i < k; ++i) {
    const auto& rows = parts.subsequences[static_cast<std::size_t>(i)].rows;
    if (rows.rows() == 0) {
      out.portfolios.push_back(uniform_portfolio<double>(returns.assets()));
      continue;
    }
    const auto [index, value] = best_fixed(rows, grid);
    Portfolio b = grid.points.row(index).transpose();
    double log_wealth = from_fixed(value);
    total += value;
    if (refine) {
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(rows.rows());
      const auto refined = maximize_log_objective(rows, ones, b, refine_tol);
      if (refined.objective > log_wealth) {
        b = refined.portfolio;
        total += to_fixed(refined.objective - log_wealth);
        log_wealth = refined.objective;
      }
    }
    out.portfolios.push_back(std::move(b));
    out.subsequence_log_wealth(i) = log_wealth;
  }
  out.log_wealth = from_fixed(total);
  return out;
}

Eigen::VectorXd best_kcc_path(const ReturnsSequence& returns, Index k, const PortfolioGrid& grid)
{
  if (k < 1)
    throw ValidationError("cycle length must be at least 1");
  if (grid.assets != returns.assets())
    throw ValidationError("grid dimension does not match the asset count");

  const Index n = returns.periods();
  const auto active = static_cast<std::size_t>(std::min(k, std::max<Index>(n, 1)));
  std::vector<FixedVector> acc(active, FixedVector(static_cast<std::size_t>(grid.size()), 0));
  std::vector<Fixed> best(active, 0);
  Fixed total = 0;
  Eigen::VectorXd path(n);
  for (Index t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t % k);
    accumulate_row(acc[i], grid, returns.row(t));
    const Fixed updated = argmax(acc[i]).second;
    total += updated - best[i];
    best[i] = updated;
    path(t) = from_fixed(total);
  }
  return path;
}

StrategyTrace run_kcc(const ReturnsSequence& returns, const std::vector<Portfolio>& portfolios)
{
  if (portfolios.empty())
    throw ValidationError("k-cyclic strategy needs at least one portfolio");
  for (const auto& b : portfolios) {
    if (b.size() != returns.assets())
      throw ValidationError("portfolio length does not match the asset count");
    require_portfolio(b);
  }
  const auto k = static_cast<Index>(portfolios.size());
  Eigen::MatrixXd held(returns.periods(), returns.assets());
  for (Index t = 0; t < returns.periods(); ++t)
    held.row(t) = portfolios[static_cast<std::size_t>(t % k)].transpose();
  return make_trace(returns, std::move(held));
}

double regret_bound(Index k, Index m, Index n, Density density)
{
  if (k < 1 || m < 1 || n < 1)
    throw ValidationError("k, m and n must be at least 1");
  const double log_horizon = std::log(static_cast<double>(n) + 1.0);
  const auto kd = static_cast<double>(k);
  const auto dims = static_cast<double>(m - 1);
  if (density == Density::uniform)
    return kd * dims * log_horizon;
  return 0.5 * kd * dims * log_horizon + kd * std::log(2.0);
}

RegretSeries check_consistency(const StrategyTrace& trace, const Eigen::VectorXd& benchmark_log_wealth,
                               Index k, Index m, Density density)
{
  const Index n = trace.periods();
  if (benchmark_log_wealth.size() != n)
    throw ValidationError("trace and benchmark lengths differ");

  RegretSeries out;
  out.regret.resize(n);
  out.bound.resize(n);
  out.ratio.resize(n);
  for (Index t = 0; t < n; ++t) {
    const auto periods = static_cast<double>(t + 1);
    const double log_gap = benchmark_log_wealth(t) - trace.log_wealth(t);
    const double bound = regret_bound(k, m, t + 1, density);
    out.regret(t) = log_gap / periods;
    out.bound(t) = bound / periods;
    out.ratio(t) = log_gap / bound;
    if (log_gap > bound)
      ++out.violations;
  }
  return out;
}

std::string regret_csv(const RegretSeries& series)
{
  std::string out = "n,regret,bound,ratio\n";
  for (Index t = 0; t < series.regret.size(); ++t)
    out += fmt::format("{},{},{},{}\n", t + 1, full_precision(series.regret(t)),
                       full_precision(series.bound(t)), full_precision(series.ratio(t)));
  return out;
}

std::string benchmark_csv(const KccBenchmark& benchmark, const std::vector<std::string>& symbols)
{
  std::string out = "position";
  for (const auto& s : symbols)
    out += "," + s;
  out += ",log_wealth\n";
  for (Index i = 0; i < benchmark.cycle; ++i) {
    out += std::to_string(i + 1);
    for (Index j = 0; j < benchmark.portfolios[static_cast<std::size_t>(i)].size(); ++j)
      out += "," + full_precision(benchmark.portfolios[static_cast<std::size_t>(i)](j));
    out += "," + full_precision(benchmark.subsequence_log_wealth(i)) + "\n";
  }
  return out;
}

} // namespace kcport
