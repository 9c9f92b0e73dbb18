// Command-line front end: detector training, analytic/simulated sweeps, single
// simulations and SVG reports.

#include <CLI11.hpp>

#include <fmt/format.h>

#include <iostream>

#include "specshare/commands.hpp"
#include "specshare/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void add_common(CLI::App* cmd, specshare::CommandOptions& opts) {
  cmd->add_option("--config", opts.configs, "Configuration file (repeatable; later files win)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "RNG seed overriding the configuration");
  cmd->add_option("--out", opts.out, "Output CSV (or SVG for report)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information simulator for spectrum sharing under jamming"};
  app.require_subcommand(1);

  specshare::CommandOptions opts;
  std::string mode;
  std::string metric;
  std::string kind;

  auto* train = app.add_subcommand("train-detector", "Train FNN/CNN detectors and write accuracy curves");
  add_common(train, opts);

  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid and write a sweep CSV");
  add_common(sweep, opts);
  sweep->add_option("--mode", mode, "analytic | simulate | both")
      ->check(CLI::IsMember({"analytic", "simulate", "both"}));
  sweep->add_flag("--svg", opts.svg, "Also render the sweep as SVG next to the CSV");
  sweep->add_option("--metric", metric, "Column to plot with --svg");

  auto* simulate = app.add_subcommand("simulate", "Run one slotted simulation");
  add_common(simulate, opts);

  auto* report = app.add_subcommand("report", "Render a sweep CSV as SVG");
  report->add_option("csv", opts.input, "Sweep CSV")->required();
  report->add_option("--out", opts.out, "Output SVG (default: CSV path with .svg)");
  report->add_option("--metric", metric, "Column to plot");
  report->add_option("--kind", kind, "line | heatmap")->check(CLI::IsMember({"line", "heatmap"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!mode.empty()) opts.mode = specshare::parse_sweep_mode(mode);
    if (!metric.empty()) opts.report.metric = metric;
    if (!kind.empty()) opts.report.kind = kind == "line" ? specshare::PlotKind::Line : specshare::PlotKind::Heatmap;

    if (*train) specshare::cmd_train_detector(opts, std::cerr);
    if (*sweep) specshare::cmd_sweep(opts, std::cerr);
    if (*simulate) specshare::cmd_simulate(opts, std::cerr);
    if (*report) specshare::cmd_report(opts, std::cerr);
  } catch (const specshare::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
