#include "kcport/core.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kcport;

namespace {

StrategyTrace trace_from_period_returns(const std::vector<double>& r)
{
  const auto n = static_cast<Index>(r.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::MatrixXd b(n, 2);
  for (Index t = 0; t < n; ++t) {
    x.row(t) << r[static_cast<std::size_t>(t)], 1.0;
    b.row(t) << 1.0, 0.0;
  }
  return make_trace(ReturnsSequence(x), b);
}

} // namespace

TEST_CASE("wealth_and_growth")
{
  SUBCASE("constant return 2")
  {
    const auto wg = wealth_and_growth(trace_from_period_returns({2, 2, 2}));
    CHECK(wg.final_wealth == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(wg.growth_rate == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("all ones")
  {
    const auto wg = wealth_and_growth(trace_from_period_returns({1, 1, 1, 1}));
    CHECK(wg.final_wealth == 1.0);
    CHECK(wg.growth_rate == 0.0);
  }
  SUBCASE("1.5 then 0.75")
  {
    const auto wg = wealth_and_growth(trace_from_period_returns({1.5, 0.75}));
    CHECK(wg.final_wealth == doctest::Approx(1.125).epsilon(1e-14));
    CHECK(wg.growth_rate == doctest::Approx(0.058891517828191).epsilon(1e-12));
  }
  SUBCASE("empty trace")
  {
    CHECK_THROWS_WITH_AS(wealth_and_growth(StrategyTrace{}), "empty trace", ValidationError);
  }
}

TEST_CASE("performance_report")
{
  SUBCASE("zero variance gives the infinite sentinel")
  {
    const auto r = performance_report(trace_from_period_returns({1.1, 1.1, 1.1}));
    CHECK(r.average_return == doctest::Approx(1.1));
    CHECK(std::isinf(r.sharpe_ratio));
    CHECK(r.sharpe_ratio > 0);
    CHECK(r.zero_variance);
    CHECK(report_row("flat", r) == "flat,1.331000,0.095310,1.100000,inf");
  }
  SUBCASE("two-point population std")
  {
    const auto r = performance_report(trace_from_period_returns({1.2, 0.8}));
    CHECK(r.average_return == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.sharpe_ratio == doctest::Approx(5.0).epsilon(1e-12));
    CHECK_FALSE(r.zero_variance);
  }
  SUBCASE("growth and mean")
  {
    const auto r = performance_report(trace_from_period_returns({1.5, 0.75}));
    CHECK(r.growth_rate == doctest::Approx(0.058891517828191).epsilon(1e-12));
    CHECK(r.average_return == doctest::Approx(1.125).epsilon(1e-14));
    CHECK(report_row("x", r).rfind("x,1.125000,0.058892,1.125000,", 0) == 0);
  }
  SUBCASE("needs two periods")
  {
    CHECK_THROWS_WITH_AS(performance_report(trace_from_period_returns({1.5})),
                         "insufficient periods", ValidationError);
  }
}

TEST_CASE("trace invariants on random data")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ret(0.5, 2.0);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 50 + rep;
    const Index m = 3;
    Eigen::MatrixXd x(n, m), b(n, m);
    for (Index t = 0; t < n; ++t) {
      for (Index j = 0; j < m; ++j) {
        x(t, j) = ret(rng);
        b(t, j) = w(rng);
      }
      b.row(t) /= b.row(t).sum();
    }
    const ReturnsSequence returns(x);
    const auto trace = make_trace(returns, b);
    const auto wg = wealth_and_growth(trace);
    CHECK(std::exp(wg.growth_rate * static_cast<double>(n)) == doctest::Approx(wg.final_wealth).epsilon(1e-9));
    CHECK(wg.final_wealth > 0.0);
    for (Index t = 0; t < n; ++t) {
      CHECK(trace.period_returns(t) == doctest::Approx(b.row(t).dot(x.row(t))).epsilon(1e-12));
      const double prev = t == 0 ? 0.0 : trace.log_wealth(t - 1);
      CHECK(std::abs(trace.log_wealth(t) - prev - std::log(trace.period_returns(t))) <= 1e-12);
    }
    const auto report = performance_report(trace);
    CHECK(std::abs(report.growth_rate - std::log(report.final_wealth) / static_cast<double>(n)) <= 1e-10);

    // Splitting and re-concatenating multiplies wealths.
    const Index cut = n / 3;
    const ReturnsSequence head(x.topRows(cut)), tail(x.bottomRows(n - cut));
    const auto joined = concatenate(make_trace(head, b.topRows(cut)), make_trace(tail, b.bottomRows(n - cut)));
    const double s_head = wealth_and_growth(make_trace(head, b.topRows(cut))).final_wealth;
    const double s_tail = wealth_and_growth(make_trace(tail, b.bottomRows(n - cut))).final_wealth;
    CHECK(wealth_and_growth(joined).final_wealth == doctest::Approx(s_head * s_tail).epsilon(1e-12));
  }
}

TEST_CASE("returns validation and portfolio checks")
{
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(ReturnsSequence{x}, ValidationError);

  Portfolio ok(3);
  ok << 0.2, 0.3, 0.5;
  CHECK_NOTHROW(require_portfolio(ok));
  Portfolio negative(2);
  negative << 1.5, -0.5;
  CHECK_THROWS_AS(require_portfolio(negative), ValidationError);
  Portfolio short_sum(2);
  short_sum << 0.5, 0.4;
  CHECK_THROWS_AS(require_portfolio(short_sum), ValidationError);
}

TEST_CASE("numeric kernels")
{
  Eigen::VectorXd v(3);
  v << 1000.0, 1000.0, -1e6;
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));

  Eigen::VectorXd p(3);
  p << 0.9, 0.8, -0.3;
  const auto proj = project_to_simplex(p);
  CHECK(on_simplex(proj));
  CHECK(proj(0) == doctest::Approx(0.55));
  CHECK(proj(1) == doctest::Approx(0.45));
  CHECK(proj(2) == 0.0);

  // Projection of a simplex point is itself.
  Eigen::VectorXd q(4);
  q << 0.1, 0.2, 0.3, 0.4;
  CHECK((project_to_simplex(q) - q).norm() < 1e-15);

  // Works on float too.
  Eigen::VectorXf f(2);
  f << 2.0f, 0.0f;
  const auto pf = project_to_simplex(f);
  CHECK(pf(0) == doctest::Approx(1.0));
}
