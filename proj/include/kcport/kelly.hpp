#pragma once

#include "kcport/core.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kcport {

struct BlockOutcome
{
  double probability = 0.0;
  Eigen::MatrixXd block; // k x m, row i is the return vector at block position i
};

/// Finite-support joint law of k consecutive return vectors.
class BlockDistribution
{
public:
  /// Validates and renormalizes the probabilities (accepted within 1e-9).
  BlockDistribution(Index k, Index m, std::vector<BlockOutcome> support);

  Index cycle() const { return k_; }
  Index assets() const { return m_; }
  const std::vector<BlockOutcome>& support() const { return support_; }

  Eigen::VectorXd probabilities() const;
  /// Row s is the position-i return vector of outcome s.
  Eigen::MatrixXd position_rows(Index i) const;

private:
  Index k_ = 0;
  Index m_ = 0;
  std::vector<BlockOutcome> support_;
};

/// Schema: {"k": int, "m": int, "support": [{"prob": p, "block": [[...m] x k]}]}
BlockDistribution parse_distribution_json(std::string_view text);
BlockDistribution parse_distribution(const std::string& path);
std::string distribution_json(const BlockDistribution& dist);

/// (1/k) sum_s p_s sum_i log<b^i, x_s^i>, exactly as a finite sum.
double optimal_growth_rate(const BlockDistribution& dist, const std::vector<Portfolio>& portfolios);

struct KLogOptimal
{
  std::vector<Portfolio> portfolios;
  Eigen::VectorXd position_objective; // E log<b^i*, X_i> per position
  double rate = 0.0;
  double max_gap = 0.0; // worst Frank-Wolfe gap over positions
};

/// The expected log objective depends on the joint law only through its
/// per-position marginals, so each position is solved on its own: a grid
/// seed at `seed_step`, then the concave refinement to `tol`.
KLogOptimal k_log_optimal(const BlockDistribution& dist, double tol, double seed_step = 0.05);

/// max over `tests` of E[prod_i (<b^i, X_i> / <b^i*, X_i>)^(1/k)]. The
/// candidate is k-log-optimal only if this never exceeds 1.
double kt_certificate(const BlockDistribution& dist, const std::vector<Portfolio>& candidate,
                      const std::vector<std::vector<Portfolio>>& tests);

/// Draws `blocks` i.i.d. outcomes and concatenates them into a
/// (blocks * k) x m sequence.
///
/// Generator contract: std::mt19937_64 seeded with `seed`; each draw takes
/// the top 53 bits as u in [0, 1) and picks the first outcome whose
/// cumulative probability exceeds u. Sequences are reproducible across
/// platforms.
ReturnsSequence simulate_market(const BlockDistribution& dist, Index blocks, std::uint64_t seed);

} // namespace kcport
