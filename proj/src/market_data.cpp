#include "kcport/market_data.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <optional>
#include <set>

namespace kcport {
namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view s)
{
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end)
    return std::nullopt;
  return value;
}

// Labels that all parse as numbers compare numerically, anything else
// lexicographically (ISO dates sort correctly that way).
void require_increasing(const std::vector<std::string>& dates)
{
  bool numeric = true;
  for (const auto& d : dates)
    numeric = numeric && parse_number(d).has_value();
  for (std::size_t t = 1; t < dates.size(); ++t) {
    const bool ok = numeric ? *parse_number(dates[t - 1]) < *parse_number(dates[t])
                            : dates[t - 1] < dates[t];
    if (!ok)
      throw ValidationError(fmt::format("row {}: date '{}' does not follow '{}'", t + 2,
                                        dates[t], dates[t - 1]));
  }
}

} // namespace

PriceTable parse_price_csv(std::string_view text)
{
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
    text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos)
      nl = text.size();
    const auto line = text.substr(start, nl - start);
    if (!trim(line).empty())
      lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty())
    throw ValidationError("price file is empty");

  PriceTable table;
  const auto header = split_fields(lines.front());
  if (header.size() < 2)
    throw ValidationError("header must be date,SYM1,...,SYMm");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j].empty())
      throw ValidationError(fmt::format("row 1, column {}: empty symbol", j + 1));
    table.symbols.emplace_back(header[j]);
  }
  if (std::set<std::string>(table.symbols.begin(), table.symbols.end()).size()
      != table.symbols.size())
    throw ValidationError("duplicate symbol in header");

  const auto m = static_cast<Index>(table.symbols.size());
  const auto rows = static_cast<Index>(lines.size()) - 1;
  if (rows < 2)
    throw ValidationError("need at least two price rows");

  table.prices.resize(rows, m);
  for (Index r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[static_cast<std::size_t>(r + 1)]);
    const Index row_no = r + 2;
    if (static_cast<Index>(fields.size()) != m + 1)
      throw ValidationError(fmt::format("row {}: expected {} fields, found {}", row_no, m + 1,
                                        fields.size()));
    table.dates.emplace_back(fields[0]);
    for (Index j = 0; j < m; ++j) {
      const auto cell = fields[static_cast<std::size_t>(j + 1)];
      const auto value = parse_number(cell);
      if (!value || !std::isfinite(*value))
        throw ValidationError(fmt::format("row {}, column {} ({}): cannot parse '{}'", row_no,
                                          j + 2, table.symbols[static_cast<std::size_t>(j)],
                                          cell));
      if (!(*value > 0.0))
        throw ValidationError(fmt::format("row {}, column {} ({}): price must be positive, got {}",
                                          row_no, j + 2,
                                          table.symbols[static_cast<std::size_t>(j)], cell));
      table.prices(r, j) = *value;
    }
  }
  require_increasing(table.dates);
  return table;
}

PriceTable read_price_csv(const std::string& path)
{
  return parse_price_csv(read_file(path));
}

ReturnsSequence to_returns(const PriceTable& table)
{
  const Index rows = table.prices.rows();
  if (rows < 2)
    throw ValidationError("need at least two price rows");
  Eigen::MatrixXd values = table.prices.bottomRows(rows - 1).array()
                           / table.prices.topRows(rows - 1).array();
  std::vector<std::string> labels(table.dates.begin() + 1, table.dates.end());
  return ReturnsSequence(std::move(values), table.symbols, std::move(labels));
}

ReturnsSequence ingest_returns(const std::string& path)
{
  return to_returns(read_price_csv(path));
}

std::string returns_csv(const ReturnsSequence& returns)
{
  std::string out = "date";
  for (const auto& s : returns.symbols())
    out += "," + s;
  out += "\n";
  for (Index t = 0; t < returns.periods(); ++t) {
    out += returns.labels().empty() ? std::to_string(t + 1)
                                    : returns.labels()[static_cast<std::size_t>(t)];
    for (Index j = 0; j < returns.assets(); ++j)
      out += "," + full_precision(returns.values()(t, j));
    out += "\n";
  }
  return out;
}

CyclicDecomposition decompose(const ReturnsSequence& returns, Index k)
{
  if (k < 1)
    throw ValidationError("cycle length must be at least 1");

  CyclicDecomposition out;
  out.cycle = k;
  out.total_periods = returns.periods();
  out.subsequences.resize(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    auto& sub = out.subsequences[static_cast<std::size_t>(i)];
    for (Index t = i; t < returns.periods(); t += k)
      sub.periods.push_back(t);
    sub.rows.resize(static_cast<Index>(sub.periods.size()), returns.assets());
    for (Index r = 0; r < sub.rows.rows(); ++r)
      sub.rows.row(r) = returns.row(sub.periods[static_cast<std::size_t>(r)]);
  }
  return out;
}

Eigen::MatrixXd interleave(const CyclicDecomposition& decomposition)
{
  Index m = 0;
  for (const auto& sub : decomposition.subsequences)
    if (sub.rows.size() > 0)
      m = sub.rows.cols();
  Eigen::MatrixXd out(decomposition.total_periods, m);
  for (const auto& sub : decomposition.subsequences)
    for (Index r = 0; r < sub.rows.rows(); ++r)
      out.row(sub.periods[static_cast<std::size_t>(r)]) = sub.rows.row(r);
  return out;
}

} // namespace kcport
