#pragma once

#include <array>
#include <cstdint>

#include "specshare/aoi_model.hpp"
#include "specshare/scenario.hpp"

namespace specshare {

// Sensing outcome counters; filled in both modes.
struct SensingTally {
  std::uint64_t incumbent_on = 0;   // slots where T1 transmitted
  std::uint64_t secondary_missed = 0;
  std::uint64_t incumbent_off = 0;
  std::uint64_t secondary_false_alarms = 0;
  // Jammer observations, by which transmitters were on.
  std::uint64_t t1_only = 0, t1_only_missed = 0;
  std::uint64_t t2_only = 0, t2_only_missed = 0;
  std::uint64_t both = 0, both_missed = 0;
  std::uint64_t idle = 0, idle_false_alarms = 0;

  // Empirical error rates; 0 when the conditioning event never occurred.
  DetectorErrorProfile rates() const;
};

struct SimReport {
  std::uint64_t n_slots = 0;
  std::array<std::uint64_t, ActiveSet::kCount> set_counts{};
  AoiStats aoi1;
  AoiStats aoi2;
  std::array<std::uint64_t, 2> attempts{};   // nodes 1, 2
  std::array<std::uint64_t, 2> successes{};  // nodes 1, 2
  double jamming_energy = 0.0;  // sum of per-slot jamming power
  double p3 = 0.0;              // per-slot jamming power in use
  double q3_analytic = 0.0;
  SensingTally sensing;

  std::array<double, ActiveSet::kCount> frequencies() const;
  double frequency(ActiveSet a) const;
  double empirical_q2() const;
  double empirical_q3() const;
  double average_jamming_power() const;
  // Per-attempt success rate of node 1 or 2; NaN without attempts.
  double success_rate(Node n) const;
};

// Slot-by-slot simulation of incumbent traffic, sensing, jamming, SINR success and
// age evolution. Deterministic given cfg.seed.
SimReport run_slotted(const ScenarioConfig& cfg);

struct BudgetCheck {
  bool within_budget = false;
  double measured = 0.0;
};

// Measured average jamming power against pbar_max (1% slack).
BudgetCheck empirical_jammer_budget_check(const SimReport& report, double pbar_max);

}  // namespace specshare
