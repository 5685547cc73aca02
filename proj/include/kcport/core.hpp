#pragma once

#include "kcport/numeric.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kcport {

/// Raised when inputs violate a documented precondition. The CLI maps this
/// to exit code 1; every other exception maps to 2.
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

using Index = Eigen::Index;
using Portfolio = Vector<double>;

inline constexpr double kSimplexTolerance = 1e-12;

/// Throws ValidationError unless `b` is a no-short portfolio.
void require_portfolio(const Portfolio& b, std::string_view what = "portfolio");

/// n x m table of strictly positive gross returns, one row per period.
class ReturnsSequence
{
public:
  ReturnsSequence() = default;
  explicit ReturnsSequence(Eigen::MatrixXd values,
                           std::vector<std::string> symbols = {},
                           std::vector<std::string> labels = {});

  Index periods() const { return values_.rows(); }
  Index assets() const { return values_.cols(); }

  const Eigen::MatrixXd& values() const { return values_; }
  auto row(Index t) const { return values_.row(t); }

  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<std::string>& labels() const { return labels_; }

private:
  Eigen::MatrixXd values_;
  std::vector<std::string> symbols_;
  std::vector<std::string> labels_;
};

/// Portfolios held over time together with what they earned.
struct StrategyTrace
{
  Eigen::MatrixXd portfolios;     // n x m, row t is b_t
  Eigen::VectorXd period_returns; // <b_t, x_t>
  Eigen::VectorXd log_wealth;     // cumulative sum of log period returns

  Index periods() const { return period_returns.size(); }
};

/// Builds a trace by evaluating `portfolios` (n x m) against `returns`.
StrategyTrace make_trace(const ReturnsSequence& returns, Eigen::MatrixXd portfolios);

/// Appends `tail` to `head`; wealths multiply.
StrategyTrace concatenate(const StrategyTrace& head, const StrategyTrace& tail);

struct WealthGrowth
{
  double final_wealth = 1.0;
  double growth_rate = 0.0;
};

WealthGrowth wealth_and_growth(const StrategyTrace& trace);

/// Table-style summary of one strategy.
///
/// sharpe_ratio is mean gross return over the population standard deviation
/// of gross returns: no risk-free subtraction, no annualization. With zero
/// dispersion it is +infinity and `zero_variance` is set.
struct PerformanceReport
{
  double final_wealth = 1.0;
  double growth_rate = 0.0;
  double average_return = 1.0;
  double sharpe_ratio = 0.0;
  bool zero_variance = false;
};

PerformanceReport performance_report(const StrategyTrace& trace);

inline constexpr std::string_view kReportHeader =
    "strategy,final_wealth,growth_rate,average_return,sharpe_ratio";
inline constexpr std::string_view kSharpeNote =
    "# sharpe_ratio = mean(gross return) / population std(gross return); "
    "no risk-free rate, no annualization";

/// One CSV row with 6 decimals; an infinite Sharpe ratio is written as "inf".
std::string report_row(std::string_view strategy, const PerformanceReport& report);

/// Shortest round-trip text for a double (17 significant digits).
std::string full_precision(double value);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

} // namespace kcport
