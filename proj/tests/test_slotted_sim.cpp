#include <gtest/gtest.h>

#include <cmath>

#include "specshare/errors.hpp"
#include "specshare/slotted_sim.hpp"
#include "support/generators.hpp"

namespace specshare {
namespace {

ScenarioConfig quick_config(double q1, double q, std::uint64_t slots, std::uint64_t seed) {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.traffic = {q1, q};
  cfg.n_slots = slots;
  cfg.seed = seed;
  return cfg;
}

TEST(RunSlotted, PerfectSensingEmptyChannelDeliversEverySlot) {
  ScenarioConfig cfg = quick_config(0.0, 1.0, 10000, 1);
  cfg.links.noise_power = 0.0;
  cfg.errors = {};
  cfg.pbar_max = 0.0;
  const SimReport r = run_slotted(cfg);
  EXPECT_EQ(r.aoi2.mean_age(), 1.0);
  EXPECT_EQ(r.successes[1], cfg.n_slots);
  // A perfect jammer still "fires" on every transmission, but with zero power.
  EXPECT_EQ((r.set_counts[ActiveSet{Node::Secondary, Node::Jammer}.mask()]), cfg.n_slots);
  EXPECT_EQ(r.attempts[0], 0u);
  EXPECT_EQ(r.jamming_energy, 0.0);
}

TEST(RunSlotted, SetFrequenciesMatchJointDistribution) {
  Rng rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    ScenarioConfig cfg = quick_config(0.0, 0.0, 1000000, 100 + trial);
    cfg.traffic = testing::random_traffic(rng);
    cfg.errors = testing::random_profile(rng);
    const AnalyticResult a = analyze(cfg);
    const SimReport r = run_slotted(cfg);
    const double n = static_cast<double>(cfg.n_slots);
    for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
      const double p = a.dist[ActiveSet::from_mask(m)];
      EXPECT_NEAR(r.frequencies()[m], p, 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12)
          << "trial " << trial << " set " << ActiveSet::from_mask(m).to_string();
    }
    EXPECT_NEAR(r.empirical_q2(), a.q2, 3.0 * std::sqrt(a.q2 * (1 - a.q2) / n) + 1e-12);
    EXPECT_NEAR(r.empirical_q3(), a.q3, 3.0 * std::sqrt(a.q3 * (1 - a.q3) / n) + 1e-12);
  }
}

TEST(RunSlotted, AverageAgeMatchesAnalytic) {
  for (auto [q1, q] : {std::pair{0.3, 0.7}, std::pair{0.5, 0.5}, std::pair{0.2, 0.9}}) {
    const ScenarioConfig cfg = quick_config(q1, q, 1000000, 3);
    const AnalyticResult a = analyze(cfg);
    const SimReport r = run_slotted(cfg);
    EXPECT_NEAR(r.aoi2.mean_age(), a.aoi2, 0.01 * a.aoi2) << q1 << " " << q;
    EXPECT_NEAR(r.aoi1.mean_age(), a.aoi1, 0.01 * a.aoi1) << q1 << " " << q;
    EXPECT_NEAR(r.success_rate(Node::Secondary), a.s2, 0.01);
  }
}

TEST(RunSlotted, JammerStaysWithinBudget) {
  ScenarioConfig cfg = quick_config(0.5, 0.5, 200000, 4);
  cfg.pbar_max = 2.0;
  const SimReport r = run_slotted(cfg);
  const BudgetCheck check = empirical_jammer_budget_check(r, cfg.pbar_max);
  EXPECT_TRUE(check.within_budget) << check.measured;
  EXPECT_NEAR(check.measured, cfg.pbar_max, 0.01 * cfg.pbar_max);

  cfg.p3_cap = 1.0;
  const SimReport capped = run_slotted(cfg);
  EXPECT_EQ(capped.p3, 1.0);
  EXPECT_LT(capped.average_jamming_power(), cfg.pbar_max);

  SimReport over;
  over.n_slots = 10;
  over.jamming_energy = 25.0;
  EXPECT_FALSE(empirical_jammer_budget_check(over, 2.0).within_budget);
}

TEST(RunSlotted, DeterministicGivenSeed) {
  const ScenarioConfig cfg = quick_config(0.4, 0.6, 50000, 9);
  const SimReport a = run_slotted(cfg);
  const SimReport b = run_slotted(cfg);
  EXPECT_EQ(a.set_counts, b.set_counts);
  EXPECT_EQ(a.aoi2.histogram(), b.aoi2.histogram());
  EXPECT_NE(run_slotted(quick_config(0.4, 0.6, 50000, 10)).set_counts, a.set_counts);
}

TEST(RunSlotted, SensingTallyRecoversProfile) {
  ScenarioConfig cfg = quick_config(0.5, 0.8, 400000, 12);
  cfg.errors = {0.2, 0.1, 0.3, 0.25, 0.15, 0.05};
  const DetectorErrorProfile e = run_slotted(cfg).sensing.rates();
  EXPECT_NEAR(e.pm, 0.2, 0.005);
  EXPECT_NEAR(e.pf, 0.1, 0.005);
  EXPECT_NEAR(e.pm1, 0.3, 0.005);
  EXPECT_NEAR(e.pm2, 0.25, 0.005);
  EXPECT_NEAR(e.pm12, 0.15, 0.01);
  EXPECT_NEAR(e.pf_j, 0.05, 0.005);
}

TEST(ScenarioConfig, Validation) {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.mode = SensingMode::Signal;
  EXPECT_THROW(run_slotted(cfg), ConfigError);

  cfg = ScenarioConfig::defaults();
  cfg.traffic.q1 = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);

  cfg = ScenarioConfig::defaults();
  cfg.pbar_max = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);

  cfg = ScenarioConfig::defaults();
  cfg.n_slots = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);

  cfg = ScenarioConfig::defaults();
  cfg.detectors = DetectorPair{std::make_shared<NetworkModel>(build_cnn(32)),
                               std::make_shared<NetworkModel>(build_fnn(32)), {}};
  cfg.mode = SensingMode::Signal;
  EXPECT_THROW(cfg.validate(), ConfigError);  // untrained and wrong packet length
}

TEST(Analyze, DefaultsAreFinite) {
  const AnalyticResult a = analyze(ScenarioConfig::defaults());
  EXPECT_GT(a.s1, 0.0);
  EXPECT_GT(a.s2, 0.0);
  EXPECT_TRUE(std::isfinite(a.aoi1));
  EXPECT_TRUE(std::isfinite(a.aoi2));
  EXPECT_NEAR(a.jammer.p3_selected * a.q3, 1.0, 1e-12);
  EXPECT_NEAR(a.aoi2, 1.0 / a.s2_slot, 1e-9);
}

TEST(Analyze, SecondaryNeverTransmits) {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.traffic.q = 0.0;
  const AnalyticResult a = analyze(cfg);
  EXPECT_TRUE(std::isnan(a.s2));
  EXPECT_TRUE(std::isinf(a.aoi2));
}

}  // namespace
}  // namespace specshare
