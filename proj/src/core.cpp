#include "kcport/core.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace kcport {

void require_portfolio(const Portfolio& b, std::string_view what)
{
  if (!on_simplex(b, kSimplexTolerance))
    throw ValidationError(fmt::format("{} is not on the simplex", what));
}

ReturnsSequence::ReturnsSequence(Eigen::MatrixXd values,
                                 std::vector<std::string> symbols,
                                 std::vector<std::string> labels)
    : values_(std::move(values)), symbols_(std::move(symbols)), labels_(std::move(labels))
{
  for (Index t = 0; t < values_.rows(); ++t)
    for (Index j = 0; j < values_.cols(); ++j) {
      const double x = values_(t, j);
      if (!(x > 0.0) || !std::isfinite(x))
        throw ValidationError(
            fmt::format("return at period {}, asset {} must be positive and finite (got {})",
                        t + 1, j + 1, x));
    }
  if (symbols_.empty())
    for (Index j = 0; j < values_.cols(); ++j)
      symbols_.push_back(fmt::format("A{}", j + 1));
  if (static_cast<Index>(symbols_.size()) != values_.cols())
    throw ValidationError("symbol count does not match asset count");
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != values_.rows())
    throw ValidationError("label count does not match period count");
}

StrategyTrace make_trace(const ReturnsSequence& returns, Eigen::MatrixXd portfolios)
{
  if (portfolios.rows() != returns.periods() || portfolios.cols() != returns.assets())
    throw ValidationError("portfolio matrix shape does not match the returns");

  StrategyTrace trace;
  trace.period_returns = (portfolios.array() * returns.values().array()).rowwise().sum();
  trace.log_wealth.resize(trace.period_returns.size());
  double acc = 0.0;
  for (Index t = 0; t < trace.period_returns.size(); ++t) {
    acc += std::log(trace.period_returns(t));
    trace.log_wealth(t) = acc;
  }
  trace.portfolios = std::move(portfolios);
  return trace;
}

StrategyTrace concatenate(const StrategyTrace& head, const StrategyTrace& tail)
{
  if (head.periods() > 0 && tail.periods() > 0
      && head.portfolios.cols() != tail.portfolios.cols())
    throw ValidationError("cannot concatenate traces over different asset counts");

  StrategyTrace out;
  const Index n = head.periods() + tail.periods();
  const Index m = head.periods() > 0 ? head.portfolios.cols() : tail.portfolios.cols();
  out.portfolios.resize(n, m);
  out.period_returns.resize(n);
  out.log_wealth.resize(n);
  const double offset = head.periods() > 0 ? head.log_wealth(head.periods() - 1) : 0.0;
  if (head.periods() > 0) {
    out.portfolios.topRows(head.periods()) = head.portfolios;
    out.period_returns.head(head.periods()) = head.period_returns;
    out.log_wealth.head(head.periods()) = head.log_wealth;
  }
  if (tail.periods() > 0) {
    out.portfolios.bottomRows(tail.periods()) = tail.portfolios;
    out.period_returns.tail(tail.periods()) = tail.period_returns;
    out.log_wealth.tail(tail.periods()) = tail.log_wealth.array() + offset;
  }
  return out;
}

WealthGrowth wealth_and_growth(const StrategyTrace& trace)
{
  const Index n = trace.periods();
  if (n < 1)
    throw ValidationError("empty trace");
  const double log_final = trace.log_wealth(n - 1);
  return {std::exp(log_final), log_final / static_cast<double>(n)};
}

PerformanceReport performance_report(const StrategyTrace& trace)
{
  const Index n = trace.periods();
  if (n < 2)
    throw ValidationError("insufficient periods");

  const auto wg = wealth_and_growth(trace);
  PerformanceReport report;
  report.final_wealth = wg.final_wealth;
  report.growth_rate = wg.growth_rate;
  report.average_return = trace.period_returns.mean();

  const double variance =
      (trace.period_returns.array() - report.average_return).square().mean();
  const double sd = std::sqrt(variance);
  if (sd > 0.0) {
    report.sharpe_ratio = report.average_return / sd;
  } else {
    report.sharpe_ratio = std::numeric_limits<double>::infinity();
    report.zero_variance = true;
  }
  return report;
}

namespace {

std::string fixed6(double value)
{
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.6f}", value);
}

} // namespace

std::string report_row(std::string_view strategy, const PerformanceReport& report)
{
  return fmt::format("{},{},{},{},{}", strategy, fixed6(report.final_wealth),
                     fixed6(report.growth_rate), fixed6(report.average_return),
                     fixed6(report.sharpe_ratio));
}

std::string full_precision(double value)
{
  return fmt::format("{:.17g}", value);
}

void write_file_atomic(const std::string& path, std::string_view content)
{
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace kcport
