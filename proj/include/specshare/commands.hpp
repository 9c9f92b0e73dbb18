#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specshare/config.hpp"
#include "specshare/report.hpp"

namespace specshare {

// Options shared by every subcommand; unset values fall back to the configuration.
struct CommandOptions {
  std::vector<std::filesystem::path> configs;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<SweepMode> mode;
  bool svg = false;
  // report only
  std::optional<std::filesystem::path> input;
  ReportOptions report;
};

// Merges the config files in order (later keys win) and builds the configuration.
AppConfig load_app_config(const std::vector<std::filesystem::path>& paths);

// Loads the configured weight files into the scenario when it runs in signal mode.
void attach_detectors(AppConfig& app);

using ProgressFn = std::function<void(const std::string&)>;

// One accuracy measurement of a trained detector at one SNR.
struct AccuracyRow {
  std::string arch;
  std::size_t packet_len = 0;
  std::size_t params = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  DetectionReport report;
};

inline const std::vector<std::string>& accuracy_columns() {
  static const std::vector<std::string> columns{"arch", "packet_len", "params", "seed",
                                                "snr_db", "accuracy", "pm", "pf"};
  return columns;
}

struct TrainedDetectors {
  std::vector<AccuracyRow> rows;
  // Error profile per packet length, extracted from the first seed's detectors.
  std::map<std::size_t, DetectorErrorProfile> profiles;
  // Trained models keyed by (arch, packet length, seed).
  std::map<std::tuple<std::string, std::size_t, std::uint64_t>, NetworkModel> models;
};

// Trains an FNN and a CNN per packet size and seed on the mixed SNR grid, evaluates
// each at every grid SNR on a fresh test set, and extracts per-size error profiles.
TrainedDetectors train_detectors(const TrainSpec& spec, const DetectionSnrs& snrs,
                                 const ProgressFn& progress = {});

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows);

// Subcommands. Each writes its CSV to opts.out (or a default name in the working
// directory) and reports the files it wrote to `log`.
void cmd_train_detector(const CommandOptions& opts, std::ostream& log);
void cmd_sweep(const CommandOptions& opts, std::ostream& log);
void cmd_simulate(const CommandOptions& opts, std::ostream& log);
void cmd_report(const CommandOptions& opts, std::ostream& log);

inline const std::vector<std::string>& simulate_columns() {
  static const std::vector<std::string> columns{
      "mode", "n_slots", "seed", "q1", "q", "packet_len", "pbar_max", "P3",
      "q2", "q3", "q2_sim", "q3_sim", "avg_jamming_power",
      "S1", "S2", "S1_sim", "S2_sim",
      "aoi1", "aoi2", "aoi1_sim", "aoi1_sim_stderr", "aoi2_sim", "aoi2_sim_stderr",
      "pm", "pf", "pm1", "pm2", "pm12", "pf_j"};
  return columns;
}

}  // namespace specshare
