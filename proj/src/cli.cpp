#include "kcport/cli.hpp"

#include "kcport/core.hpp"
#include "kcport/hindsight.hpp"
#include "kcport/kelly.hpp"
#include "kcport/market_data.hpp"
#include "kcport/svg.hpp"
#include "kcport/universal.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace kcport::cli {
namespace {

namespace fs = std::filesystem;

struct Artifact
{
  std::string name;
  std::string content;
};

std::string report_header()
{
  return fmt::format("{}\n{}\n", kSharpeNote, kReportHeader);
}

void require_file(const std::string& path, std::string_view what)
{
  if (path.empty())
    throw ValidationError(fmt::format("missing {}", what));
  if (!fs::is_regular_file(path))
    throw ValidationError(fmt::format("{} not found: {}", what, path));
}

void prepare_output_dir(const std::string& dir)
{
  if (dir.empty())
    throw ValidationError("missing --out directory");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ValidationError(fmt::format("cannot create output directory {}", dir));
  const fs::path probe = fs::path(dir) / ".kcport_write_probe";
  {
    std::ofstream test(probe);
    if (!test)
      throw ValidationError(fmt::format("output directory {} is not writable", dir));
  }
  fs::remove(probe, ec);
}

void validate_cycles(const std::vector<Index>& cycles)
{
  if (cycles.empty())
    throw ValidationError("--k needs at least one cycle length");
  for (const Index k : cycles)
    if (k < 1)
      throw ValidationError(fmt::format("cycle length {} must be at least 1", k));
}

void commit(const std::string& dir, const std::vector<Artifact>& artifacts)
{
  for (const auto& a : artifacts)
    write_file_atomic((fs::path(dir) / a.name).string(), a.content);
}

void warn_zero_variance(std::ostream& err, std::string_view strategy, const PerformanceReport& r)
{
  if (r.zero_variance)
    err << "warning: " << strategy << " has zero return dispersion; sharpe_ratio reported as inf\n";
}

Eigen::VectorXd growth_path(const Eigen::VectorXd& log_wealth)
{
  Eigen::VectorXd out(log_wealth.size());
  for (Index t = 0; t < log_wealth.size(); ++t)
    out(t) = log_wealth(t) / static_cast<double>(t + 1);
  return out;
}

int cmd_backtest(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  require_file(cfg.input, "input");
  validate_cycles(cfg.cycles);
  if (cfg.grid_step)
    divisions_for_step(*cfg.grid_step);
  prepare_output_dir(cfg.output);

  const auto returns = ingest_returns(cfg.input);
  const double step = cfg.grid_step.value_or(default_grid_step(returns.assets()));
  auto grid = std::make_shared<const PortfolioGrid>(make_grid(returns.assets(), step, cfg.density));

  std::vector<Artifact> artifacts;
  std::string report = report_header();
  std::string benchmarks = report_header();
  std::vector<ChartSeries> wealth_series;
  std::vector<ChartSeries> regret_series;
  std::vector<ChartSeries> diff_series;
  std::optional<Eigen::VectorXd> reference_growth;
  if (cfg.svg)
    reference_growth = growth_path(run_kpup(returns, 1, grid).log_wealth);

  for (const Index k : cfg.cycles) {
    const auto trace = run_kpup(returns, k, grid);
    const auto path = best_kcc_path(returns, k, *grid);
    const auto regret = check_consistency(trace, path, k, returns.assets(), cfg.density);
    const auto bench = best_kcc(returns, k, *grid, cfg.refine);
    const auto bench_trace = run_kcc(returns, bench.portfolios);

    const auto name = fmt::format("{}-PUP", k);
    const auto perf = performance_report(trace);
    warn_zero_variance(err, name, perf);
    report += report_row(name, perf) + "\n";
    const auto bench_name = fmt::format("Best {}-CC", k);
    const auto bench_perf = performance_report(bench_trace);
    warn_zero_variance(err, bench_name, bench_perf);
    benchmarks += report_row(bench_name, bench_perf) + "\n";

    artifacts.push_back({fmt::format("wealth_path_k{}.csv", k), trace_csv(trace, returns.symbols())});
    artifacts.push_back({fmt::format("regret_k{}.csv", k), regret_csv(regret)});
    artifacts.push_back({fmt::format("kcc_k{}.csv", k), benchmark_csv(bench, returns.symbols())});
    if (regret.violations > 0)
      err << fmt::format("warning: {} periods exceed the regret bound for k={}\n", regret.violations, k);

    if (cfg.svg) {
      wealth_series.push_back({name, trace.log_wealth});
      wealth_series.push_back({bench_name, path});
      regret_series.push_back({fmt::format("regret k={}", k), regret.regret});
      regret_series.push_back({fmt::format("bound/n k={}", k), regret.bound});
      if (k > 1)
        diff_series.push_back({fmt::format("W({}) - W(1-PUP)", name),
                               growth_path(trace.log_wealth) - *reference_growth});
    }
  }
  artifacts.push_back({"report.csv", report});
  artifacts.push_back({"benchmarks.csv", benchmarks});
  if (cfg.svg) {
    artifacts.push_back({"wealth_paths.svg",
                         line_chart_svg("Log wealth", "period", "log wealth", wealth_series)});
    artifacts.push_back({"regret.svg", line_chart_svg("Growth-rate regret vs bound", "period",
                                                      "nats / period", regret_series)});
    artifacts.push_back({"growth_diff.svg", line_chart_svg("Growth rate relative to 1-PUP",
                                                           "period", "nats / period", diff_series)});
  }
  commit(cfg.output, artifacts);
  out << fmt::format("backtest: {} periods, {} assets, {} grid points, wrote {} files to {}\n",
                     returns.periods(), returns.assets(), grid->size(), artifacts.size(), cfg.output);
  return 0;
}

int cmd_hindsight(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  require_file(cfg.input, "input");
  validate_cycles(cfg.cycles);
  if (cfg.grid_step)
    divisions_for_step(*cfg.grid_step);
  prepare_output_dir(cfg.output);

  const auto returns = ingest_returns(cfg.input);
  const double step = cfg.grid_step.value_or(default_grid_step(returns.assets()));
  const auto grid = generate_grid_for_step(returns.assets(), step);

  std::vector<Artifact> artifacts;
  std::string report = report_header();
  for (Index j = 0; j < returns.assets(); ++j) {
    Portfolio vertex = Portfolio::Zero(returns.assets());
    vertex(j) = 1.0;
    const auto name = fmt::format("Buy and hold on {}", returns.symbols()[static_cast<std::size_t>(j)]);
    const auto perf = performance_report(run_kcc(returns, {vertex}));
    warn_zero_variance(err, name, perf);
    report += report_row(name, perf) + "\n";
  }
  for (const Index k : cfg.cycles) {
    const auto bench = best_kcc(returns, k, grid, cfg.refine);
    const auto name = fmt::format("Best {}-CC", k);
    const auto perf = performance_report(run_kcc(returns, bench.portfolios));
    warn_zero_variance(err, name, perf);
    report += report_row(name, perf) + "\n";
    artifacts.push_back({fmt::format("kcc_k{}.csv", k), benchmark_csv(bench, returns.symbols())});
  }
  artifacts.push_back({"report.csv", report});
  commit(cfg.output, artifacts);
  out << fmt::format("hindsight: wrote {} files to {}\n", artifacts.size(), cfg.output);
  return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  require_file(cfg.distribution, "distribution");
  validate_cycles(cfg.cycles);
  if (cfg.blocks < 1)
    throw ValidationError("--blocks must be at least 1");
  if (cfg.grid_step)
    divisions_for_step(*cfg.grid_step);
  const auto dist = parse_distribution(cfg.distribution);
  if (dist.assets() < 2)
    throw ValidationError("simulation needs at least two assets");
  prepare_output_dir(cfg.output);

  const auto returns = simulate_market(dist, cfg.blocks, cfg.seed);
  const double step = cfg.grid_step.value_or(default_grid_step(dist.assets()));
  auto grid = std::make_shared<const PortfolioGrid>(make_grid(dist.assets(), step, cfg.density));
  const auto kelly = k_log_optimal(dist, 1e-10);
  const auto kelly_trace = run_kcc(returns, kelly.portfolios);
  const Index k = dist.cycle();

  std::vector<Artifact> artifacts;
  artifacts.push_back({"returns.csv", returns_csv(returns)});

  std::string kelly_csv = "position";
  for (const auto& s : returns.symbols())
    kelly_csv += "," + s;
  kelly_csv += ",expected_log_return\n";
  for (Index i = 0; i < k; ++i) {
    kelly_csv += std::to_string(i + 1);
    for (Index j = 0; j < dist.assets(); ++j)
      kelly_csv += "," + full_precision(kelly.portfolios[static_cast<std::size_t>(i)](j));
    kelly_csv += "," + full_precision(kelly.position_objective(i)) + "\n";
  }
  kelly_csv += "# rate," + full_precision(kelly.rate) + "\n";
  artifacts.push_back({"kelly.csv", kelly_csv});

  std::string report = report_header();
  const auto kelly_name = fmt::format("Kelly {}-CC", k);
  const auto kelly_perf = performance_report(kelly_trace);
  warn_zero_variance(err, kelly_name, kelly_perf);
  report += report_row(kelly_name, kelly_perf) + "\n";

  std::vector<StrategyTrace> traces;
  for (const Index kp : cfg.cycles) {
    traces.push_back(run_kpup(returns, kp, grid));
    const auto name = fmt::format("{}-PUP", kp);
    const auto perf = performance_report(traces.back());
    warn_zero_variance(err, name, perf);
    report += report_row(name, perf) + "\n";
    artifacts.push_back({fmt::format("trace_k{}.csv", kp), trace_csv(traces.back(), returns.symbols())});
  }
  artifacts.push_back({"report.csv", report});

  // Sampled at block boundaries n = k(t+1).
  std::string conv = "block,n,rate,kelly_growth,kelly_abs_diff";
  for (const Index kp : cfg.cycles)
    conv += fmt::format(",pup{0}_growth,pup{0}_abs_diff", kp);
  conv += "\n";
  std::vector<ChartSeries> chart(cfg.cycles.size() + 1);
  chart[0].name = kelly_name;
  chart[0].values.resize(cfg.blocks);
  for (std::size_t c = 0; c < cfg.cycles.size(); ++c) {
    chart[c + 1].name = fmt::format("{}-PUP", cfg.cycles[c]);
    chart[c + 1].values.resize(cfg.blocks);
  }
  for (Index t = 0; t < cfg.blocks; ++t) {
    const Index n = k * (t + 1);
    const double w_kelly = kelly_trace.log_wealth(n - 1) / static_cast<double>(n);
    conv += fmt::format("{},{},{},{},{}", t + 1, n, full_precision(kelly.rate),
                        full_precision(w_kelly), full_precision(std::abs(w_kelly - kelly.rate)));
    chart[0].values(t) = w_kelly;
    for (std::size_t c = 0; c < traces.size(); ++c) {
      const double w = traces[c].log_wealth(n - 1) / static_cast<double>(n);
      conv += "," + full_precision(w) + "," + full_precision(std::abs(w - kelly.rate));
      chart[c + 1].values(t) = w;
    }
    conv += "\n";
  }
  artifacts.push_back({"convergence.csv", conv});
  if (cfg.svg)
    artifacts.push_back({"convergence.svg",
                         line_chart_svg(fmt::format("Growth rate at block boundaries (optimum {:.6f})",
                                                    kelly.rate),
                                        "block", "nats / period", chart)});
  commit(cfg.output, artifacts);
  out << fmt::format("simulate: {} blocks of {} periods, optimal rate {:.6f}, wrote {} files to {}\n",
                     cfg.blocks, k, kelly.rate, artifacts.size(), cfg.output);
  return 0;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out)
{
  if (cfg.cycles.size() != 1)
    throw ValidationError("bounds takes exactly one --k");
  out << fmt::format("{:.6f}\n",
                     regret_bound(cfg.cycles.front(), cfg.bound_m, cfg.bound_n, cfg.density));
  return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out)
{
  if (cfg.inputs.empty())
    throw ValidationError("report needs --inputs");
  if (cfg.output.empty())
    throw ValidationError("report needs --out");
  for (const auto& path : cfg.inputs)
    require_file(path, "report input");

  std::string merged = report_header();
  for (const auto& path : cfg.inputs) {
    std::istringstream lines(read_file(path));
    std::string line;
    bool header_seen = false;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.empty() || line.front() == '#')
        continue;
      if (!header_seen) {
        if (line != kReportHeader)
          throw ValidationError(fmt::format("{} is not a report file", path));
        header_seen = true;
        continue;
      }
      merged += line + "\n";
    }
    if (!header_seen)
      throw ValidationError(fmt::format("{} is not a report file", path));
  }
  const fs::path target(cfg.output);
  if (target.has_parent_path())
    fs::create_directories(target.parent_path());
  write_file_atomic(cfg.output, merged);
  out << "report: wrote " << cfg.output << "\n";
  return 0;
}

} // namespace

double default_grid_step(Index assets)
{
  return assets >= 4 ? 0.025 : 0.01;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  RunConfig cfg;
  std::string density = "uniform";

  CLI::App app{"Growth-optimal portfolio toolkit: k-parallel Universal Portfolio, "
               "k-cyclic benchmarks, generalized Kelly simulation"};
  app.name("kcport");
  app.require_subcommand(1);

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid-step", cfg.grid_step, "simplex grid pitch (1/step must be an integer)");
    sub->add_option("--density", density, "prior: uniform or dirichlet_half");
  };

  auto* backtest = app.add_subcommand("backtest", "k-PUP strategies and benchmarks on price data");
  backtest->add_option("--input", cfg.input, "wide price CSV")->required();
  backtest->add_option("--k", cfg.cycles, "cycle lengths, comma separated")->delimiter(',');
  backtest->add_option("--out", cfg.output, "output directory")->required();
  backtest->add_flag("--refine", cfg.refine, "refine benchmark portfolios off the grid");
  backtest->add_flag("--svg", cfg.svg, "write SVG charts");
  add_grid(backtest);

  auto* hindsight = app.add_subcommand("hindsight", "best k-cyclic constant strategies only");
  hindsight->add_option("--input", cfg.input, "wide price CSV")->required();
  hindsight->add_option("--k", cfg.cycles, "cycle lengths, comma separated")->delimiter(',');
  hindsight->add_option("--out", cfg.output, "output directory")->required();
  hindsight->add_flag("--refine", cfg.refine, "refine benchmark portfolios off the grid");
  add_grid(hindsight);

  auto* simulate = app.add_subcommand("simulate", "block-wise i.i.d. market simulation");
  simulate->add_option("--dist", cfg.distribution, "distribution JSON")->required();
  simulate->add_option("--blocks", cfg.blocks, "number of blocks")->required();
  simulate->add_option("--seed", cfg.seed, "generator seed");
  simulate->add_option("--k-pup", cfg.cycles, "k-PUP cycle lengths, comma separated")->delimiter(',');
  simulate->add_option("--out", cfg.output, "output directory")->required();
  simulate->add_flag("--svg", cfg.svg, "write SVG charts");
  add_grid(simulate);

  auto* bounds = app.add_subcommand("bounds", "worst-case regret bound value");
  bounds->add_option("--m", cfg.bound_m, "asset count")->required();
  bounds->add_option("--k", cfg.cycles, "cycle length")->required();
  bounds->add_option("--n", cfg.bound_n, "horizon")->required();
  bounds->add_option("--density", density, "uniform or dirichlet_half");

  auto* report = app.add_subcommand("report", "merge report CSVs");
  report->add_option("--inputs", cfg.inputs, "report files, comma separated")->delimiter(',')->required();
  report->add_option("--out", cfg.output, "merged CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << active->help();
    return 1;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.density = parse_density(density);
    if (cfg.subcommand == "backtest")
      return cmd_backtest(cfg, out, err);
    if (cfg.subcommand == "hindsight")
      return cmd_hindsight(cfg, out, err);
    if (cfg.subcommand == "simulate")
      return cmd_simulate(cfg, out, err);
    if (cfg.subcommand == "bounds")
      return cmd_bounds(cfg, out);
    return cmd_report(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv)
{
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

} // namespace kcport::cli
