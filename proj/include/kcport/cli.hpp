#pragma once

#include "kcport/simplex.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kcport::cli {

struct RunConfig
{
  std::string subcommand;
  std::string input;
  std::string output;
  std::vector<Index> cycles{1};
  std::optional<double> grid_step;
  Density density = Density::uniform;
  bool refine = false;
  bool svg = false;
  std::uint64_t seed = 0;
  Index blocks = 0;
  std::string distribution;
  std::vector<std::string> inputs; // report
  Index bound_m = 0;
  Index bound_n = 0;
};

/// Default pitch: 0.025 from four assets up, 0.01 below.
double default_grid_step(Index assets);

/// Exit codes: 0 success, 1 validation or usage error, 2 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace kcport::cli
