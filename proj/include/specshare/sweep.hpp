#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specshare/config.hpp"

namespace specshare {

// Column order of every sweep CSV. Operating-point columns come first, then analytic
// results, then simulated ages with their batch-means standard errors. Columns a mode
// does not compute are left empty.
inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns{
      "q1", "q", "p2_db", "packet_len", "pbar_max",
      "S1", "S2", "q2", "q3", "P3",
      "aoi1", "aoi2",
      "aoi1_sim", "aoi1_sim_stderr", "aoi2_sim", "aoi2_sim_stderr"};
  return columns;
}

struct SweepRow {
  double q1 = 0.0;
  double q = 0.0;
  double p2_db = 0.0;
  std::size_t packet_len = 0;
  double pbar_max = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double p3 = 0.0;
  std::optional<double> aoi1;
  std::optional<double> aoi2;
  std::optional<double> aoi1_sim;
  std::optional<double> aoi1_sim_stderr;
  std::optional<double> aoi2_sim;
  std::optional<double> aoi2_sim_stderr;
};

// Scenario for one grid point: the base scenario with the swept values applied.
// Throws ConfigError when a value cannot be applied (e.g. no profile for a packet size).
ScenarioConfig scenario_at(const AppConfig& app, const std::vector<std::pair<std::string, double>>& point);

// Grid points in output order: the first parameter varies slowest.
std::vector<std::vector<std::pair<std::string, double>>> sweep_points(const SweepSpec& spec);

// Evaluates every grid point, concurrently on up to `threads` workers (0 = hardware
// concurrency). Simulated points use seed derive_seed(seed, point index), so results
// do not depend on scheduling. All points are validated before any is evaluated.
std::vector<SweepRow> run_sweep(const AppConfig& app, std::uint64_t seed, unsigned threads = 0);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Shortest text that round-trips the value; "inf"/"nan" for non-finite values.
std::string format_number(double value);

}  // namespace specshare
