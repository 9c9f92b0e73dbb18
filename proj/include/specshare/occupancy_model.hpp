#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specshare/active_set.hpp"

namespace specshare {

// Sensing error probabilities of the secondary (pm, pf) and the jammer (the rest).
struct DetectorErrorProfile {
  double pm = 0.0;    // secondary misses the incumbent
  double pf = 0.0;    // secondary false alarm on an idle channel
  double pm1 = 0.0;   // jammer misses T1 alone
  double pm2 = 0.0;   // jammer misses T2 alone
  double pm12 = 0.0;  // jammer misses T1+T2 together
  double pf_j = 0.0;  // jammer false alarm on an idle channel

  // Throws ArgumentError when a field is outside [0,1].
  void validate() const;
  // Soft consistency findings (e.g. combined miss rate above a single-transmitter one).
  std::vector<std::string> warnings() const;
};

struct TrafficParams {
  double q1 = 0.0;  // incumbent occupies the slot
  double q = 0.0;   // secondary has a packet

  void validate() const;
};

struct JammerBudget {
  double pbar_max = 0.0;
  double p3_selected = 0.0;
  double q3 = 0.0;
  bool active = false;
  bool capped = false;
};

// q2 = [(1-q1)(1-pf) + q1 pm] q
double secondary_tx_prob(const TrafficParams& traffic, const DetectorErrorProfile& errors);

// Joint law of the active set in one slot.
EventDistribution joint_active_set_distribution(const TrafficParams& traffic,
                                                const DetectorErrorProfile& errors);

// q3: mass of the sets containing the jammer.
double jammer_activation_prob(const EventDistribution& dist);

// Spend the whole average budget: P3 = pbar_max / q3, optionally clipped at p3_cap.
JammerBudget select_jamming_power(double pbar_max, double q3,
                                  std::optional<double> p3_cap = std::nullopt);

}  // namespace specshare
