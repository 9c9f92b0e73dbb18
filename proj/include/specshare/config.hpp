#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specshare/scenario.hpp"

namespace specshare {

// Flat key=value settings with dotted section prefixes. Later files override earlier
// ones key by key. '#' starts a comment; blank lines are ignored.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap parse(const std::string& text, const std::string& origin = "<string>");
  static ConfigMap load(const std::filesystem::path& path);

  void merge(const ConfigMap& other);
  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

 private:
  std::map<std::string, std::string> entries_;
};

// Parses "lo:hi:step" (inclusive of hi) or a comma-separated list; throws ConfigError.
std::vector<double> parse_grid(const std::string& text, const std::string& key = "grid");
std::vector<double> parse_list(const std::string& text, const std::string& key = "list");

enum class SweepMode { Analytic, Simulate, Both };

SweepMode parse_sweep_mode(const std::string& text);
const char* to_string(SweepMode mode);

// Sweepable operating-point parameters; each one is a column of the sweep CSV.
inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"q1", "q", "p2_db", "packet_len", "pbar_max"};
  return names;
}

struct SweepSpec {
  std::string param = "q1";
  std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::optional<std::string> param2;
  std::vector<double> grid2;
  SweepMode mode = SweepMode::Analytic;

  std::size_t size() const { return grid.size() * (param2 ? grid2.size() : 1); }
  // Throws ConfigError on an empty grid or an unknown parameter name.
  void validate() const;
};

struct ArchitectureBudget {
  std::uint64_t n_per_class = 10000;
  std::uint64_t epochs = 30;
};

struct TrainSpec {
  std::vector<std::size_t> sizes{16, 64, 128};
  std::vector<double> snr_grid{-10.0, -5.0, 0.0, 5.0, 10.0};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  ArchitectureBudget fnn;
  ArchitectureBudget cnn;
  std::uint64_t n_test_per_class = 2000;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double dropout = 0.1;
  // Sample count per class used when turning trained detectors into error profiles.
  std::uint64_t profile_n_per_class = 2000;

  void validate() const;
};

// Everything a command needs, assembled from merged configuration files.
struct AppConfig {
  ScenarioConfig scenario;
  // Profile used for packet lengths without a per-size entry.
  DetectorErrorProfile base_errors = ScenarioConfig::default_profile();
  // Error-profile keys set explicitly under errors.*; they win over a per-size profile.
  std::map<std::string, double> error_overrides;
  // Detector error profiles per packet length (profile.<N>.<field>).
  std::map<std::size_t, DetectorErrorProfile> profiles;
  DetectionSnrs detection_snrs;
  std::optional<std::filesystem::path> cnn_weights;
  std::optional<std::filesystem::path> fnn_weights;
  SweepSpec sweep;
  TrainSpec train;
  // Baseline secondary transmit power that p2_db is relative to.
  double p2_reference = 1.0;

  // Error profile in force for a packet length: per-size profile if one is known,
  // else base_errors, then explicit errors.* keys on top.
  DetectorErrorProfile profile_for(std::size_t packet_len) const;
};

// Builds an AppConfig; rejects unknown keys and invalid values with ConfigError.
AppConfig build_app_config(const ConfigMap& map);

// Serializes per-size profiles as profile.<N>.<field>=value lines.
std::string profiles_to_text(const std::map<std::size_t, DetectorErrorProfile>& profiles);

}  // namespace specshare
