#pragma once

#include "kcport/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace kcport {

/// Wide price table: one row per date, one column per symbol.
struct PriceTable
{
  std::vector<std::string> dates;
  std::vector<std::string> symbols;
  Eigen::MatrixXd prices;
};

/// Parses "date,SYM1,...,SYMm" CSV text. Errors name the offending row and
/// column (1-based, header is row 1).
PriceTable parse_price_csv(std::string_view text);
PriceTable read_price_csv(const std::string& path);

/// Gross returns p_{t+1} / p_t, labelled with the later date.
ReturnsSequence to_returns(const PriceTable& table);

ReturnsSequence ingest_returns(const std::string& path);

/// Same wide layout as the input, with returns in place of prices.
std::string returns_csv(const ReturnsSequence& returns);

/// Round-robin split of a sequence by period index modulo k.
struct CyclicDecomposition
{
  struct Subsequence
  {
    std::vector<Index> periods; // 0-based indices into the original sequence
    Eigen::MatrixXd rows;
  };

  Index cycle = 1;
  Index total_periods = 0;
  std::vector<Subsequence> subsequences;
};

CyclicDecomposition decompose(const ReturnsSequence& returns, Index k);

/// Inverse of decompose.
Eigen::MatrixXd interleave(const CyclicDecomposition& decomposition);

} // namespace kcport
