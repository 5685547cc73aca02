#include "kcport/hindsight.hpp"
#include "kcport/universal.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kcport;

namespace {

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

ReturnsSequence constant(Index n, double a, double b)
{
  Eigen::MatrixXd x(n, 2);
  x.col(0).setConstant(a);
  x.col(1).setConstant(b);
  return ReturnsSequence(x);
}

ReturnsSequence alternating(Index n)
{
  Eigen::MatrixXd x(n, 2);
  for (Index t = 0; t < n; ++t)
    x.row(t) << 1.0, (t % 2 == 0 ? 2.0 : 0.5);
  return ReturnsSequence(x);
}

Portfolio vec(double a, double b)
{
  Portfolio p(2);
  p << a, b;
  return p;
}

} // namespace

TEST_CASE("best_crp")
{
  const auto grid = make_grid(2, 0.05, Density::uniform);
  SUBCASE("dominant asset")
  {
    const auto best = best_crp(constant(7, 2.0, 1.0), grid);
    CHECK(best.portfolio == vec(1.0, 0.0));
    CHECK(best.log_wealth == doctest::Approx(7.0 * std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("single period")
  {
    const auto best = best_crp(constant(1, 2.0, 1.0), grid);
    CHECK(best.portfolio == vec(1.0, 0.0));
    CHECK(std::exp(best.log_wealth) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("alternating market")
  {
    const auto best = best_crp(alternating(10), grid);
    CHECK((best.portfolio - vec(0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(best.log_wealth == doctest::Approx(5.0 * std::log(1.125)).epsilon(1e-14));
  }
  SUBCASE("ties go to the lowest grid index")
  {
    const auto best = best_crp(constant(3, 1.0, 1.0), grid);
    CHECK(best.grid_index == 0);
  }
  SUBCASE("matches an exhaustive double-precision scan")
  {
    const auto g3 = make_grid(3, 0.05, Density::uniform);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_returns(30, 3, seed);
      const auto best = best_crp(x, g3);
      double top = -INFINITY;
      for (Index g = 0; g < g3.size(); ++g) {
        const Portfolio b = g3.points.row(g).transpose();
        top = std::max(top, (x.values() * b).array().log().sum());
      }
      CHECK(best.log_wealth == doctest::Approx(top).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(best_crp_rows(Eigen::MatrixXd(0, 2), grid), ValidationError);
}

TEST_CASE("refine_crp")
{
  SUBCASE("interior optimum")
  {
    const auto b = refine_crp(alternating(10), vec(0.4, 0.6), 1e-10);
    CHECK((b - vec(0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-5);
  }
  SUBCASE("already optimal")
  {
    const auto x = alternating(10);
    const auto b = refine_crp(x, vec(0.5, 0.5), 1e-10);
    const double f0 = (x.values() * vec(0.5, 0.5)).array().log().mean();
    const double f1 = (x.values() * b).array().log().mean();
    CHECK(std::abs(f1 - f0) <= 1e-10);
  }
  SUBCASE("vertex optimum")
  {
    const auto x = constant(5, 2.0, 1.0);
    const auto b = refine_crp(x, vec(0.3, 0.7), 1e-10);
    CHECK(std::abs((x.values() * b).array().log().mean() - std::log(2.0)) <= 1e-10);
  }
  SUBCASE("never lowers the objective")
  {
    const auto g3 = make_grid(3, 0.1, Density::uniform);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto x = random_returns(25, 3, seed);
      const auto seed_point = best_crp(x, g3).portfolio;
      const auto b = refine_crp(x, seed_point, 1e-10);
      CHECK(on_simplex(b, 1e-12));
      CHECK((x.values() * b).array().log().mean()
            >= (x.values() * seed_point).array().log().mean());
    }
  }
}

TEST_CASE("maximize_log_objective reaches a small duality gap")
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = random_returns(40, 4, seed);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(40, 1.0 / 40.0);
    const auto result = maximize_log_objective(x.values(), w, uniform_portfolio<double>(4), 1e-12);
    CHECK(result.gap <= 1e-8);
    CHECK(on_simplex(result.portfolio, 1e-12));
  }
}

TEST_CASE("best_kcc")
{
  const auto grid = make_grid(2, 0.05, Density::uniform);
  SUBCASE("calendar pattern")
  {
    const auto x = alternating(4);
    const auto kcc = best_kcc(x, 2, grid);
    REQUIRE(kcc.portfolios.size() == 2);
    CHECK(kcc.portfolios[0] == vec(0.0, 1.0));
    CHECK(kcc.portfolios[1] == vec(1.0, 0.0));
    CHECK(kcc.log_wealth == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(best_kcc(x, 1, grid).log_wealth
          == doctest::Approx(2.0 * std::log(1.125)).epsilon(1e-14));
  }
  SUBCASE("k >= n picks per-period vertices")
  {
    const auto x = random_returns(4, 2, 3);
    for (Index k : {4, 6}) {
      const auto kcc = best_kcc(x, k, grid);
      CHECK(kcc.log_wealth
            == doctest::Approx(x.values().rowwise().maxCoeff().array().log().sum()).epsilon(1e-14));
      CHECK(kcc.portfolios.size() == static_cast<std::size_t>(k));
      if (k > 4)
        CHECK(kcc.portfolios[5] == uniform_portfolio<double>(2));
    }
  }
  SUBCASE("k = 1 equals best_crp")
  {
    const auto x = random_returns(30, 2, 4);
    const auto crp = best_crp(x, grid);
    const auto kcc = best_kcc(x, 1, grid);
    CHECK(kcc.log_wealth == crp.log_wealth);
    CHECK(kcc.portfolios[0] == crp.portfolio);
  }
  SUBCASE("factorization and refinement")
  {
    const auto g3 = make_grid(3, 0.1, Density::uniform);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_returns(31, 3, seed);
      for (Index k : {2, 3}) {
        const auto kcc = best_kcc(x, k, g3);
        CHECK(kcc.log_wealth == doctest::Approx(kcc.subsequence_log_wealth.sum()).epsilon(1e-14));
        CHECK(run_kcc(x, kcc.portfolios).log_wealth(30)
              == doctest::Approx(kcc.log_wealth).epsilon(1e-12));
        const auto refined = best_kcc(x, k, g3, true);
        CHECK(refined.log_wealth >= kcc.log_wealth - 1e-12);
      }
    }
  }
  SUBCASE("divisibility monotonicity is exact")
  {
    const auto g3 = make_grid(3, 0.1, Density::uniform);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_returns(50, 3, seed);
      const double w1 = best_kcc(x, 1, g3).log_wealth;
      const double w2 = best_kcc(x, 2, g3).log_wealth;
      const double w4 = best_kcc(x, 4, g3).log_wealth;
      const double w6 = best_kcc(x, 6, g3).log_wealth;
      CHECK(w1 <= w2);
      CHECK(w2 <= w4);
      CHECK(w2 <= w6);
    }
  }
  SUBCASE("prefix path agrees with direct evaluation")
  {
    const auto x = random_returns(12, 2, 9);
    const auto path = best_kcc_path(x, 3, grid);
    REQUIRE(path.size() == 12);
    for (Index n = 1; n <= 12; ++n) {
      const ReturnsSequence prefix(x.values().topRows(n));
      CHECK(path(n - 1) == best_kcc(prefix, 3, grid).log_wealth);
    }
  }
}

TEST_CASE("regret_bound")
{
  CHECK(regret_bound(1, 2, 1, Density::uniform) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(regret_bound(1, 2, 1, Density::dirichlet_half) == doctest::Approx(1.039721).epsilon(1e-6));
  CHECK(regret_bound(3, 4, 99, Density::uniform) == doctest::Approx(41.44653).epsilon(1e-6));
  CHECK_THROWS_AS(regret_bound(0, 2, 1, Density::uniform), ValidationError);
}

TEST_CASE("check_consistency")
{
  SUBCASE("strategy equal to the benchmark")
  {
    const auto x = random_returns(20, 2, 5);
    const auto grid = make_grid(2, 0.05, Density::uniform);
    const auto kcc = best_kcc(x, 2, grid);
    const auto trace = run_kcc(x, kcc.portfolios);
    const auto series = check_consistency(trace, trace.log_wealth, 2, 2, Density::uniform);
    CHECK(series.regret.cwiseAbs().maxCoeff() == 0.0);
    CHECK(series.violations == 0);
  }
  SUBCASE("k-PUP stays within the bound on random markets")
  {
    for (auto density : {Density::uniform, Density::dirichlet_half}) {
      const auto grid = std::make_shared<const PortfolioGrid>(make_grid(3, 0.1, density));
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto x = random_returns(40, 3, seed);
        for (Index k : {1, 2, 3}) {
          const auto trace = run_kpup(x, k, grid);
          const auto series =
              check_consistency(trace, best_kcc_path(x, k, *grid), k, 3, density);
          CHECK(series.violations == 0);
          CHECK(series.ratio.maxCoeff() <= 1.0);
        }
      }
    }
  }
  SUBCASE("length mismatch")
  {
    const auto x = random_returns(5, 2, 1);
    const auto trace = run_kcc(x, {uniform_portfolio<double>(2)});
    CHECK_THROWS_AS(check_consistency(trace, Eigen::VectorXd::Zero(4), 1, 2, Density::uniform),
                    ValidationError);
  }
  SUBCASE("csv")
  {
    RegretSeries s;
    s.regret = Eigen::VectorXd::Constant(1, 0.5);
    s.bound = Eigen::VectorXd::Constant(1, 1.0);
    s.ratio = Eigen::VectorXd::Constant(1, 0.5);
    CHECK(regret_csv(s) == "n,regret,bound,ratio\n1,0.5,1,0.5\n");
  }
}
