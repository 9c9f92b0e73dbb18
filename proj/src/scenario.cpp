#include "specshare/scenario.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "specshare/aoi_model.hpp"
#include "specshare/errors.hpp"

namespace specshare {

namespace {

constexpr double kPathGain = 1.0 / 16.0;

double mean_age_or_inf(double slot_success) {
  // The literal success form can exceed 1; report its reciprocal unchecked.
  if (slot_success > 1.0) return 1.0 / slot_success;
  return slot_success > 0.0 ? average_aoi(slot_success) : std::numeric_limits<double>::infinity();
}

}  // namespace

DetectorErrorProfile ScenarioConfig::default_profile() {
  DetectorErrorProfile p;
  p.pm = 0.15;
  p.pf = 0.10;
  p.pm1 = 0.30;
  p.pm2 = 0.30;
  p.pm12 = 0.20;
  p.pf_j = 0.10;
  return p;
}

ScenarioConfig ScenarioConfig::defaults() {
  ScenarioConfig cfg;
  cfg.links = LinkBudget::uniform({1.0, 1.0, 0.0}, kPathGain, 1.0, kPathGain, 1.0);
  cfg.errors = default_profile();
  return cfg;
}

void ScenarioConfig::validate() const {
  try {
    traffic.validate();
    links.validate();
    errors.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (!(pbar_max >= 0.0)) throw ConfigError("jammer.pbar_max must be >= 0");
  if (p3_cap && !(*p3_cap >= 0.0)) throw ConfigError("jammer.p3_cap must be >= 0");
  if (n_slots < 1) throw ConfigError("sim.n_slots must be >= 1");
  if (mode == SensingMode::Signal) {
    if (!detectors || !detectors->cnn || !detectors->fnn) {
      throw ConfigError("signal mode needs both a CNN and an FNN detector");
    }
    if (!detectors->cnn->trained() || !detectors->fnn->trained()) {
      throw ConfigError("signal mode needs trained detectors");
    }
    if (detectors->cnn->packet_len() != packet_len || detectors->fnn->packet_len() != packet_len) {
      throw ConfigError(fmt::format("detectors were not trained for {}-sample packets", packet_len));
    }
  } else if (detectors) {
    throw ConfigError("detectors are configured but the sensing mode is probabilistic");
  }
}

AnalyticResult analyze(const ScenarioConfig& cfg) {
  AnalyticResult r;
  r.dist = joint_active_set_distribution(cfg.traffic, cfg.errors);
  r.q2 = secondary_tx_prob(cfg.traffic, cfg.errors);
  r.q3 = jammer_activation_prob(r.dist);
  r.jammer = select_jamming_power(cfg.pbar_max, r.q3, cfg.p3_cap);
  r.links = cfg.links;
  r.links.power(Node::Jammer) = r.jammer.p3_selected;

  r.s1_slot = slot_success_prob(Node::Incumbent, r.dist, r.links, cfg.form);
  r.s2_slot = slot_success_prob(Node::Secondary, r.dist, r.links, cfg.form);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double attempts1 = r.dist.marginal(Node::Incumbent);
  const double attempts2 = r.dist.marginal(Node::Secondary);
  r.s1 = attempts1 > 0.0 ? r.s1_slot / attempts1 : nan;
  r.s2 = attempts2 > 0.0 ? r.s2_slot / attempts2 : nan;
  r.aoi1 = mean_age_or_inf(r.s1_slot);
  r.aoi2 = mean_age_or_inf(r.s2_slot);
  return r;
}

}  // namespace specshare
