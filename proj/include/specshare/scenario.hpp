#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "specshare/link_model.hpp"
#include "specshare/neural_detector.hpp"
#include "specshare/occupancy_model.hpp"

namespace specshare {

enum class SensingMode { Probabilistic, Signal };

// Trained detectors driving signal-mode sensing.
struct DetectorPair {
  std::shared_ptr<const NetworkModel> cnn;  // secondary
  std::shared_ptr<const NetworkModel> fnn;  // jammer
  DetectionSnrs snrs;
};

struct ScenarioConfig {
  TrafficParams traffic{0.5, 0.5};
  LinkBudget links;
  // Drives sensing in probabilistic mode; in both modes it fixes the jammer's
  // analytic duty cycle and hence its per-slot power.
  DetectorErrorProfile errors;
  SensingMode mode = SensingMode::Probabilistic;
  std::optional<DetectorPair> detectors;
  double pbar_max = 1.0;
  std::optional<double> p3_cap;
  std::size_t packet_len = 64;
  std::uint64_t n_slots = 100000;
  std::uint64_t seed = 1;
  SuccessForm form = SuccessForm::RayleighOutage;

  // Path gain 2^-4, unit mean fading, unit transmit powers, noise at the received
  // power (0 dB), gamma_min = 1, 64-sample packets.
  static ScenarioConfig defaults();
  static DetectorErrorProfile default_profile();

  // Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

// Closed-form evaluation of one operating point.
struct AnalyticResult {
  EventDistribution dist;
  double q2 = 0.0;
  double q3 = 0.0;
  JammerBudget jammer;
  LinkBudget links;  // with the selected jamming power filled in
  // Success probability per transmission attempt; NaN when the node never transmits.
  double s1 = 0.0;
  double s2 = 0.0;
  // Per-slot delivery probability (attempt probability times s_i).
  double s1_slot = 0.0;
  double s2_slot = 0.0;
  // Mean age 1/s_i_slot; +inf when nothing is ever delivered.
  double aoi1 = 0.0;
  double aoi2 = 0.0;
};

AnalyticResult analyze(const ScenarioConfig& cfg);

}  // namespace specshare
