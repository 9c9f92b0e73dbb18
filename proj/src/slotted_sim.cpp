#include "specshare/slotted_sim.hpp"

#include <cmath>
#include <limits>

#include "specshare/errors.hpp"
#include "specshare/rng.hpp"

namespace specshare {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

enum Stream : std::uint64_t { kSlotStream = 1, kPacketStream = 2 };

// Per-slot sensing decisions, either drawn from the error profile or produced by
// running the detectors on synthesized packets.
class Sensor {
 public:
  Sensor(const ScenarioConfig& cfg, Rng& rng)
      : cfg_(cfg), rng_(rng), packet_seed_(derive_seed(cfg.seed, kPacketStream)) {}

  // True when the secondary believes the channel is busy.
  bool secondary_busy(bool incumbent_on, std::uint64_t slot) {
    if (cfg_.mode == SensingMode::Probabilistic) {
      return incumbent_on ? !bernoulli(rng_, cfg_.errors.pm) : bernoulli(rng_, cfg_.errors.pf);
    }
    const auto& d = *cfg_.detectors;
    const IqPacket pkt = incumbent_on ? packet(Label::Signal, d.snrs.incumbent_at_secondary, slot, 0)
                                      : packet(Label::NoSignal, 0.0, slot, 0);
    return classify(*d.cnn, pkt);
  }

  // True when the jammer decides to jam.
  bool jammer_fires(bool t1_on, bool t2_on, std::uint64_t slot) {
    const DetectorErrorProfile& e = cfg_.errors;
    if (cfg_.mode == SensingMode::Probabilistic) {
      if (t1_on && t2_on) return !bernoulli(rng_, e.pm12);
      if (t1_on) return !bernoulli(rng_, e.pm1);
      if (t2_on) return !bernoulli(rng_, e.pm2);
      return bernoulli(rng_, e.pf_j);
    }
    const auto& d = *cfg_.detectors;
    IqPacket seen;
    if (t1_on && t2_on) {
      seen = superpose(packet(Label::Signal, d.snrs.incumbent_at_jammer, slot, 1),
                       packet(Label::Signal, d.snrs.secondary_at_jammer, slot, 2));
    } else if (t1_on) {
      seen = packet(Label::Signal, d.snrs.incumbent_at_jammer, slot, 1);
    } else if (t2_on) {
      seen = packet(Label::Signal, d.snrs.secondary_at_jammer, slot, 2);
    } else {
      seen = packet(Label::NoSignal, 0.0, slot, 3);
    }
    return classify(*d.fnn, seen);
  }

 private:
  IqPacket packet(Label label, double snr_db, std::uint64_t slot, std::uint64_t which) const {
    return generate_packet(cfg_.packet_len, label, snr_db, derive_seed(packet_seed_, 4 * slot + which));
  }

  const ScenarioConfig& cfg_;
  Rng& rng_;
  std::uint64_t packet_seed_;
};

}  // namespace

DetectorErrorProfile SensingTally::rates() const {
  DetectorErrorProfile p;
  p.pm = ratio(secondary_missed, incumbent_on);
  p.pf = ratio(secondary_false_alarms, incumbent_off);
  p.pm1 = ratio(t1_only_missed, t1_only);
  p.pm2 = ratio(t2_only_missed, t2_only);
  p.pm12 = ratio(both_missed, both);
  p.pf_j = ratio(idle_false_alarms, idle);
  return p;
}

std::array<double, ActiveSet::kCount> SimReport::frequencies() const {
  std::array<double, ActiveSet::kCount> f{};
  for (std::size_t m = 0; m < f.size(); ++m) f[m] = ratio(set_counts[m], n_slots);
  return f;
}

double SimReport::frequency(ActiveSet a) const { return ratio(set_counts[a.mask()], n_slots); }

double SimReport::empirical_q2() const {
  std::uint64_t n = 0;
  for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
    if (ActiveSet::from_mask(m).contains(Node::Secondary)) n += set_counts[m];
  }
  return ratio(n, n_slots);
}

double SimReport::empirical_q3() const {
  std::uint64_t n = 0;
  for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
    if (ActiveSet::from_mask(m).contains(Node::Jammer)) n += set_counts[m];
  }
  return ratio(n, n_slots);
}

double SimReport::average_jamming_power() const {
  return n_slots ? jamming_energy / static_cast<double>(n_slots) : 0.0;
}

double SimReport::success_rate(Node n) const {
  const int k = slot_of(n);
  if (k > 1) return std::numeric_limits<double>::quiet_NaN();
  if (attempts[k] == 0) return std::numeric_limits<double>::quiet_NaN();
  return ratio(successes[k], attempts[k]);
}

SimReport run_slotted(const ScenarioConfig& cfg) {
  cfg.validate();
  const AnalyticResult analytic = analyze(cfg);
  const LinkBudget& links = analytic.links;

  std::array<std::array<double, 2>, ActiveSet::kCount> closed_form{};
  for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
    const ActiveSet a = ActiveSet::from_mask(m);
    for (Node n : {Node::Incumbent, Node::Secondary}) {
      if (a.contains(n)) closed_form[m][slot_of(n)] = success_prob_given_set(n, a, links, cfg.form);
    }
  }

  Rng rng = make_rng(cfg.seed, kSlotStream);
  Sensor sensor(cfg, rng);

  SimReport report;
  report.n_slots = cfg.n_slots;
  report.p3 = analytic.jammer.p3_selected;
  report.q3_analytic = analytic.q3;
  SensingTally& tally = report.sensing;

  std::uint64_t age1 = 1;
  std::uint64_t age2 = 1;
  for (std::uint64_t t = 0; t < cfg.n_slots; ++t) {
    const bool t1_on = bernoulli(rng, cfg.traffic.q1);
    const bool has_packet = bernoulli(rng, cfg.traffic.q);

    const bool busy = sensor.secondary_busy(t1_on, t);
    if (t1_on) {
      ++tally.incumbent_on;
      if (!busy) ++tally.secondary_missed;
    } else {
      ++tally.incumbent_off;
      if (busy) ++tally.secondary_false_alarms;
    }
    const bool t2_on = has_packet && !busy;

    const bool jam = sensor.jammer_fires(t1_on, t2_on, t);
    if (t1_on && t2_on) {
      ++tally.both;
      if (!jam) ++tally.both_missed;
    } else if (t1_on) {
      ++tally.t1_only;
      if (!jam) ++tally.t1_only_missed;
    } else if (t2_on) {
      ++tally.t2_only;
      if (!jam) ++tally.t2_only_missed;
    } else {
      ++tally.idle;
      if (jam) ++tally.idle_false_alarms;
    }

    ActiveSet active;
    if (t1_on) active = active.with(Node::Incumbent);
    if (t2_on) active = active.with(Node::Secondary);
    if (jam) active = active.with(Node::Jammer);
    ++report.set_counts[active.mask()];
    if (jam) report.jamming_energy += report.p3;

    std::array<bool, 2> delivered{false, false};
    for (Node n : {Node::Incumbent, Node::Secondary}) {
      if (!active.contains(n)) continue;
      const int k = slot_of(n);
      ++report.attempts[k];
      delivered[k] = cfg.mode == SensingMode::Probabilistic
                         ? bernoulli(rng, closed_form[active.mask()][k])
                         : draw_sinr_success(n, active, links, rng);
      if (delivered[k]) ++report.successes[k];
    }
    age1 = aoi_step(age1, delivered[0]);
    age2 = aoi_step(age2, delivered[1]);
    report.aoi1.record(age1);
    report.aoi2.record(age2);
  }
  return report;
}

BudgetCheck empirical_jammer_budget_check(const SimReport& report, double pbar_max) {
  BudgetCheck check;
  check.measured = report.average_jamming_power();
  check.within_budget = check.measured <= pbar_max * 1.01;
  return check;
}

}  // namespace specshare
