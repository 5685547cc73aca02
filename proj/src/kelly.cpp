#include "kcport/kelly.hpp"

#include "kcport/hindsight.hpp"
#include "kcport/simplex.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <random>

namespace kcport {

BlockDistribution::BlockDistribution(Index k, Index m, std::vector<BlockOutcome> support)
    : k_(k), m_(m), support_(std::move(support))
{
  if (k_ < 1 || m_ < 1)
    throw ValidationError("k and m must be at least 1");
  if (support_.empty())
    throw ValidationError("support is empty");

  double total = 0.0;
  for (std::size_t s = 0; s < support_.size(); ++s) {
    const auto& outcome = support_[s];
    if (!(outcome.probability > 0.0) || outcome.probability > 1.0)
      throw ValidationError(
          fmt::format("support[{}]: probability {} outside (0, 1]", s, outcome.probability));
    if (outcome.block.rows() != k_ || outcome.block.cols() != m_)
      throw ValidationError(fmt::format("support[{}]: block is {}x{}, expected {}x{}", s,
                                        outcome.block.rows(), outcome.block.cols(), k_, m_));
    for (Index i = 0; i < k_; ++i)
      for (Index j = 0; j < m_; ++j) {
        const double x = outcome.block(i, j);
        if (!(x > 0.0) || !std::isfinite(x))
          throw ValidationError(fmt::format(
              "support[{}]: block entry {} at row {}, column {} must be positive", s, x, i + 1,
              j + 1));
      }
    for (std::size_t r = 0; r < s; ++r)
      if (support_[r].block == outcome.block)
        throw ValidationError(fmt::format("support[{}] duplicates support[{}]", s, r));
    total += outcome.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError(fmt::format("probabilities sum to {:g}", total));
  for (auto& outcome : support_)
    outcome.probability /= total;
}

Eigen::VectorXd BlockDistribution::probabilities() const
{
  Eigen::VectorXd p(static_cast<Index>(support_.size()));
  for (std::size_t s = 0; s < support_.size(); ++s)
    p(static_cast<Index>(s)) = support_[s].probability;
  return p;
}

Eigen::MatrixXd BlockDistribution::position_rows(Index i) const
{
  Eigen::MatrixXd rows(static_cast<Index>(support_.size()), m_);
  for (std::size_t s = 0; s < support_.size(); ++s)
    rows.row(static_cast<Index>(s)) = support_[s].block.row(i);
  return rows;
}

BlockDistribution parse_distribution_json(std::string_view text)
{
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("distribution is not valid JSON: {}", e.what()));
  }

  try {
    const auto k = doc.at("k").get<Index>();
    const auto m = doc.at("m").get<Index>();
    if (k < 1 || m < 1)
      throw ValidationError("k and m must be at least 1");
    std::vector<BlockOutcome> support;
    const auto& entries = doc.at("support");
    if (!entries.is_array())
      throw ValidationError("support must be an array");
    for (std::size_t s = 0; s < entries.size(); ++s) {
      const auto& entry = entries[s];
      BlockOutcome outcome;
      outcome.probability = entry.at("prob").get<double>();
      const auto& block = entry.at("block");
      if (!block.is_array() || static_cast<Index>(block.size()) != k)
        throw ValidationError(fmt::format("support[{}]: block must have k = {} rows", s, k));
      outcome.block.resize(k, m);
      for (Index i = 0; i < k; ++i) {
        const auto& row = block[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != m)
          throw ValidationError(
              fmt::format("support[{}]: block row {} must have m = {} entries", s, i + 1, m));
        for (Index j = 0; j < m; ++j)
          outcome.block(i, j) = row[static_cast<std::size_t>(j)].get<double>();
      }
      support.push_back(std::move(outcome));
    }
    return BlockDistribution(k, m, std::move(support));
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("distribution schema error: {}", e.what()));
  }
}

BlockDistribution parse_distribution(const std::string& path)
{
  return parse_distribution_json(read_file(path));
}

std::string distribution_json(const BlockDistribution& dist)
{
  nlohmann::json doc;
  doc["k"] = dist.cycle();
  doc["m"] = dist.assets();
  auto support = nlohmann::json::array();
  for (const auto& outcome : dist.support()) {
    auto block = nlohmann::json::array();
    for (Index i = 0; i < dist.cycle(); ++i) {
      auto row = nlohmann::json::array();
      for (Index j = 0; j < dist.assets(); ++j)
        row.push_back(outcome.block(i, j));
      block.push_back(row);
    }
    support.push_back({{"prob", outcome.probability}, {"block", block}});
  }
  doc["support"] = support;
  return doc.dump(2);
}

namespace {

void require_tuple(const BlockDistribution& dist, const std::vector<Portfolio>& tuple,
                   std::string_view what)
{
  if (static_cast<Index>(tuple.size()) != dist.cycle())
    throw ValidationError(fmt::format("{} needs {} portfolios", what, dist.cycle()));
  for (const auto& b : tuple) {
    if (b.size() != dist.assets())
      throw ValidationError(fmt::format("{} portfolio has the wrong length", what));
    require_portfolio(b, what);
  }
}

} // namespace

double optimal_growth_rate(const BlockDistribution& dist, const std::vector<Portfolio>& portfolios)
{
  require_tuple(dist, portfolios, "growth-rate tuple");
  const Eigen::VectorXd p = dist.probabilities();
  double total = 0.0;
  for (Index i = 0; i < dist.cycle(); ++i) {
    const Eigen::VectorXd gross = dist.position_rows(i) * portfolios[static_cast<std::size_t>(i)];
    if ((gross.array() <= 0.0).any())
      throw ValidationError("portfolio has zero return on a support row");
    total += p.dot(gross.array().log().matrix());
  }
  return total / static_cast<double>(dist.cycle());
}

KLogOptimal k_log_optimal(const BlockDistribution& dist, double tol, double seed_step)
{
  if (!(tol > 0.0))
    throw ValidationError("tolerance must be positive");
  const PortfolioGrid seeds = generate_grid_for_step(std::max<Index>(dist.assets(), 2), seed_step);
  const Eigen::VectorXd p = dist.probabilities();

  KLogOptimal out;
  out.position_objective.resize(dist.cycle());
  for (Index i = 0; i < dist.cycle(); ++i) {
    const Eigen::MatrixXd rows = dist.position_rows(i);
    Portfolio seed;
    if (dist.assets() == 1) {
      seed = Portfolio::Ones(1);
    } else {
      const Eigen::VectorXd values = (seeds.points * rows.transpose()).array().log().matrix() * p;
      Index best = 0;
      values.maxCoeff(&best);
      seed = seeds.points.row(best).transpose();
    }
    const auto solved = maximize_log_objective(rows, p, seed, tol);
    out.portfolios.push_back(solved.portfolio);
    out.position_objective(i) = solved.objective;
    out.max_gap = std::max(out.max_gap, solved.gap);
  }
  out.rate = out.position_objective.sum() / static_cast<double>(dist.cycle());
  return out;
}

double kt_certificate(const BlockDistribution& dist, const std::vector<Portfolio>& candidate,
                      const std::vector<std::vector<Portfolio>>& tests)
{
  require_tuple(dist, candidate, "candidate");
  if (tests.empty())
    throw ValidationError("no test tuples");

  const Eigen::VectorXd p = dist.probabilities();
  const auto k = static_cast<double>(dist.cycle());
  std::vector<Eigen::MatrixXd> rows;
  Eigen::MatrixXd log_denominator(p.size(), dist.cycle());
  for (Index i = 0; i < dist.cycle(); ++i) {
    rows.push_back(dist.position_rows(i));
    const Eigen::VectorXd gross = rows.back() * candidate[static_cast<std::size_t>(i)];
    if ((gross.array() <= 0.0).any())
      throw ValidationError("zero denominator: candidate has zero return on a support row");
    log_denominator.col(i) = gross.array().log();
  }

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& test : tests) {
    require_tuple(dist, test, "test tuple");
    Eigen::VectorXd log_ratio = Eigen::VectorXd::Zero(p.size());
    for (Index i = 0; i < dist.cycle(); ++i)
      log_ratio += ((rows[static_cast<std::size_t>(i)] * test[static_cast<std::size_t>(i)])
                        .array()
                        .log()
                        .matrix()
                    - log_denominator.col(i));
    const double expectation = p.dot((log_ratio.array() / k).exp().matrix());
    worst = std::max(worst, expectation);
  }
  return worst;
}

ReturnsSequence simulate_market(const BlockDistribution& dist, Index blocks, std::uint64_t seed)
{
  if (blocks < 1)
    throw ValidationError("block count must be at least 1");

  const Eigen::VectorXd p = dist.probabilities();
  std::vector<double> cumulative(static_cast<std::size_t>(p.size()));
  double running = 0.0;
  for (Index s = 0; s < p.size(); ++s) {
    running += p(s);
    cumulative[static_cast<std::size_t>(s)] = running;
  }
  cumulative.back() = 1.0;

  std::mt19937_64 engine(seed);
  const Index k = dist.cycle();
  Eigen::MatrixXd values(blocks * k, dist.assets());
  for (Index t = 0; t < blocks; ++t) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    std::size_t s = 0;
    while (s + 1 < cumulative.size() && !(u < cumulative[s]))
      ++s;
    values.middleRows(t * k, k) = dist.support()[s].block;
  }
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(values.rows()));
  for (Index t = 0; t < values.rows(); ++t)
    labels.push_back(std::to_string(t + 1));
  return ReturnsSequence(std::move(values), {}, std::move(labels));
}

} // namespace kcport
