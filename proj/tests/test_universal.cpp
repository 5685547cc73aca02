#include "kcport/hindsight.hpp"
#include "kcport/market_data.hpp"
#include "kcport/universal.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kcport;

namespace {

std::shared_ptr<const PortfolioGrid> shared_grid(Index m, double step,
                                                 Density density = Density::uniform)
{
  return std::make_shared<const PortfolioGrid>(make_grid(m, step, density));
}

ReturnsSequence random_returns(Index n, Index m, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::MatrixXd x(n, m);
  for (Index t = 0; t < n; ++t)
    for (Index j = 0; j < m; ++j)
      x(t, j) = u(rng);
  return ReturnsSequence(x);
}

ReturnsSequence alternating(Index n)
{
  Eigen::MatrixXd x(n, 2);
  for (Index t = 0; t < n; ++t)
    x.row(t) << 1.0, (t % 2 == 0 ? 2.0 : 0.5);
  return ReturnsSequence(x);
}

Eigen::RowVectorXd row(std::initializer_list<double> values)
{
  Eigen::RowVectorXd r(static_cast<Index>(values.size()));
  Index j = 0;
  for (double v : values)
    r(j++) = v;
  return r;
}

} // namespace

TEST_CASE("up_portfolio")
{
  SUBCASE("empty history is uniform")
  {
    for (Index m = 2; m <= 4; ++m)
      for (auto density : {Density::uniform, Density::dirichlet_half}) {
        const UpState state(shared_grid(m, 0.05, density));
        CHECK((up_portfolio(state) - uniform_portfolio<double>(m)).cwiseAbs().maxCoeff() < 1e-14);
      }
  }
  SUBCASE("one observation of (2,1)")
  {
    // Brute-force Riemann sum on the same grid: sum t(1+t) / sum (1+t), t = i/N.
    for (Index divisions : {100, 200}) {
      double num = 0.0, den = 0.0;
      for (Index i = 0; i <= divisions; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(divisions);
        num += t * (1.0 + t);
        den += 1.0 + t;
      }
      const auto state = up_observe(
          UpState(shared_grid(2, 1.0 / static_cast<double>(divisions))), row({2.0, 1.0}));
      const auto b = up_portfolio(state);
      CHECK(b(0) == doctest::Approx(num / den).epsilon(1e-12));
      CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-15));
    }
    // The grid converges to the continuum value 5/9 at rate 1/(9N).
    const auto fine = up_portfolio(up_observe(UpState(shared_grid(2, 0.005)), row({2.0, 1.0})));
    CHECK(std::abs(fine(0) - 5.0 / 9.0) <= 1e-3);
  }
  SUBCASE("all-ones history leaves the portfolio uniform")
  {
    UpState state(shared_grid(3, 0.05));
    for (int t = 0; t < 10; ++t)
      state.observe(row({1.0, 1.0, 1.0}));
    CHECK((up_portfolio(state) - uniform_portfolio<double>(3)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("extreme wealth spreads stay finite")
  {
    UpState state(shared_grid(2, 0.01));
    for (int t = 0; t < 5000; ++t)
      state.observe(row({3.0, 0.2}));
    const auto b = up_portfolio(state);
    CHECK(b.allFinite());
    CHECK(on_simplex(b, 1e-12));
    CHECK(b(0) > 0.99);
  }
}

TEST_CASE("up_observe")
{
  const auto grid = shared_grid(2, 0.5);
  const UpState fresh(grid);
  CHECK(up_observe(fresh, row({1.0, 1.0})).log_wealth() == fresh.log_wealth());

  const auto after = up_observe(fresh, row({2.0, 1.0}));
  // Grid is (0,1), (0.5,0.5), (1,0).
  CHECK(after.log_wealth()(2) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(after.log_wealth()(0) == 0.0);
  CHECK(after.observations() == 1);

  const auto a = row({1.3, 0.7}), b = row({0.6, 1.9});
  const auto ab = up_observe(up_observe(fresh, a), b);
  const auto ba = up_observe(up_observe(fresh, b), a);
  CHECK(ab.log_wealth() == ba.log_wealth());

  CHECK_THROWS_AS(up_observe(fresh, row({1.0, 0.0})), ValidationError);
  CHECK_THROWS_AS(up_observe(fresh, row({1.0, -2.0})), ValidationError);
  CHECK_THROWS_AS(up_observe(fresh, row({1.0, 1.0, 1.0})), ValidationError);
}

TEST_CASE("run_kpup")
{
  const auto grid = shared_grid(3, 0.05);
  const auto x = random_returns(40, 3, 7);

  SUBCASE("first min(k, n) portfolios are uniform")
  {
    for (Index k : {1, 2, 5, 60}) {
      const auto trace = run_kpup(x, k, grid);
      REQUIRE(trace.periods() == 40);
      for (Index t = 0; t < std::min<Index>(k, 40); ++t)
        CHECK(trace.portfolios.row(t).transpose() == uniform_portfolio<double>(3));
    }
  }
  SUBCASE("k = 1 is the plain universal portfolio")
  {
    const auto trace = run_kpup(x, 1, grid);
    UpState state(grid);
    for (Index t = 0; t < x.periods(); ++t) {
      if (t == 0)
        CHECK((up_portfolio(state) - uniform_portfolio<double>(3)).cwiseAbs().maxCoeff() < 1e-15);
      else
        CHECK(trace.portfolios.row(t).transpose() == up_portfolio(state));
      state.observe(x.row(t));
    }
  }
  SUBCASE("k = 2 on an alternating market replays the even subsequence")
  {
    const auto g2 = shared_grid(2, 0.01);
    const auto trace = run_kpup(alternating(20), 2, g2);
    UpState replay(g2);
    for (Index t = 0; t < 10; ++t) {
      CHECK(trace.portfolios.row(2 * t).transpose() == up_portfolio(replay));
      replay.observe(row({1.0, 2.0}));
    }
  }
  SUBCASE("mixture identity and dominance")
  {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto seq = random_returns(60, 3, seed);
      for (auto density : {Density::uniform, Density::dirichlet_half}) {
        const auto g = shared_grid(3, 0.05, density);
        const auto trace = run_kpup(seq, 1, g);
        UpState state(g);
        for (Index t = 0; t < seq.periods(); ++t)
          state.observe(seq.row(t));
        const double mixture = mixture_log_wealth(state);
        const double log_s = trace.log_wealth(seq.periods() - 1);
        CHECK(std::abs(std::expm1(log_s - mixture)) <= 1e-9);
        CHECK(log_s < state.log_wealth().maxCoeff());
      }
    }
  }
  SUBCASE("mixture identity per subsequence for k >= 2")
  {
    const auto trace = run_kpup(x, 3, grid);
    const auto d = decompose(x, 3);
    double total = 0.0;
    for (const auto& s : d.subsequences) {
      UpState state(grid);
      for (Index r = 0; r < s.rows.rows(); ++r)
        state.observe(s.rows.row(r));
      total += mixture_log_wealth(state);
    }
    CHECK(trace.log_wealth(x.periods() - 1) == doctest::Approx(total).epsilon(1e-11));
  }
  SUBCASE("portfolios stay on the simplex")
  {
    const auto trace = run_kpup(random_returns(200, 3, 11), 2, grid);
    for (Index t = 0; t < trace.periods(); ++t)
      CHECK(on_simplex(Portfolio(trace.portfolios.row(t).transpose()), 1e-12));
  }
  CHECK_THROWS_AS(run_kpup(x, 0, grid), ValidationError);
}

TEST_CASE("trace_csv")
{
  const auto trace = run_kpup(alternating(2), 1, make_grid(2, 0.5, Density::uniform));
  const auto csv = trace_csv(trace, {"A", "B"});
  CHECK(csv.rfind("period,A,B,period_return,log_wealth\n1,0.5,0.5,1.5,", 0) == 0);
}
