#include "specshare/occupancy_model.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "specshare/errors.hpp"

namespace specshare {

namespace {

void require_probability(const char* name, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError(fmt::format("{} = {} is not a probability", name, p));
  }
}

}  // namespace

void DetectorErrorProfile::validate() const {
  require_probability("pm", pm);
  require_probability("pf", pf);
  require_probability("pm1", pm1);
  require_probability("pm2", pm2);
  require_probability("pm12", pm12);
  require_probability("pf_j", pf_j);
}

std::vector<std::string> DetectorErrorProfile::warnings() const {
  std::vector<std::string> out;
  if (pm12 > std::min(pm1, pm2)) {
    out.push_back(fmt::format(
        "pm12 = {} exceeds min(pm1, pm2) = {}; combined signals should be easier to detect", pm12,
        std::min(pm1, pm2)));
  }
  return out;
}

void TrafficParams::validate() const {
  require_probability("q1", q1);
  require_probability("q", q);
}

double secondary_tx_prob(const TrafficParams& traffic, const DetectorErrorProfile& errors) {
  traffic.validate();
  errors.validate();
  return ((1.0 - traffic.q1) * (1.0 - errors.pf) + traffic.q1 * errors.pm) * traffic.q;
}

EventDistribution joint_active_set_distribution(const TrafficParams& traffic,
                                                const DetectorErrorProfile& e) {
  traffic.validate();
  e.validate();
  const double q1 = traffic.q1;
  const double q = traffic.q;

  // Incumbent on, secondary (wrongly) transmits / stays silent.
  const double both_on = q1 * e.pm * q;
  const double incumbent_only = q1 * ((1.0 - e.pm) + e.pm * (1.0 - q));
  // Incumbent off, secondary transmits / stays silent.
  const double secondary_only = (1.0 - q1) * (1.0 - e.pf) * q;
  const double idle = (1.0 - q1) * (e.pf + (1.0 - e.pf) * (1.0 - q));

  EventDistribution dist;
  using enum Node;
  dist[{Incumbent, Secondary, Jammer}] = both_on * (1.0 - e.pm12);
  dist[{Incumbent, Secondary}] = both_on * e.pm12;
  dist[{Secondary, Jammer}] = secondary_only * (1.0 - e.pm2);
  dist[{Secondary}] = secondary_only * e.pm2;
  dist[{Incumbent, Jammer}] = incumbent_only * (1.0 - e.pm1);
  dist[{Incumbent}] = incumbent_only * e.pm1;
  dist[{Jammer}] = idle * e.pf_j;
  dist[{}] = idle * (1.0 - e.pf_j);
  return dist;
}

double jammer_activation_prob(const EventDistribution& dist) {
  return dist.marginal(Node::Jammer);
}

JammerBudget select_jamming_power(double pbar_max, double q3, std::optional<double> p3_cap) {
  if (!(pbar_max >= 0.0)) throw ArgumentError(fmt::format("pbar_max = {} must be >= 0", pbar_max));
  require_probability("q3", q3);
  if (p3_cap && !(*p3_cap >= 0.0)) throw ArgumentError("p3_cap must be >= 0");

  JammerBudget budget;
  budget.pbar_max = pbar_max;
  budget.q3 = q3;
  if (q3 <= 0.0) return budget;

  budget.active = true;
  budget.p3_selected = pbar_max / q3;
  if (p3_cap && budget.p3_selected > *p3_cap) {
    budget.p3_selected = *p3_cap;
    budget.capped = true;
  }
  return budget;
}

}  // namespace specshare
