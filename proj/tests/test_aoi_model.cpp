#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "specshare/aoi_model.hpp"
#include "specshare/errors.hpp"
#include "support/stats.hpp"

namespace specshare {
namespace {

TEST(AoiStep, Recursion) {
  EXPECT_EQ(aoi_step(5, true), 1u);
  EXPECT_EQ(aoi_step(5, false), 6u);
  EXPECT_EQ(aoi_step(1, false), 2u);
  EXPECT_THROW(aoi_step(0, true), ArgumentError);
}

TEST(SteadyState, Examples) {
  EXPECT_EQ(steady_state_prob(1.0, 1), 1.0);
  EXPECT_EQ(steady_state_prob(1.0, 2), 0.0);
  EXPECT_DOUBLE_EQ(steady_state_prob(0.5, 3), 0.125);
  EXPECT_THROW(steady_state_prob(0.0, 1), NumericError);
}

TEST(SteadyState, PartialSums) {
  for (double s : {0.05, 0.3, 0.77, 1.0}) {
    double sum = 0.0;
    for (std::uint64_t k = 1; k <= 60; ++k) {
      sum += steady_state_prob(s, k);
      EXPECT_NEAR(sum, 1.0 - std::pow(1.0 - s, static_cast<double>(k)), 1e-14);
    }
  }
}

TEST(AverageAoi, Examples) {
  EXPECT_EQ(average_aoi(1.0), 1.0);
  EXPECT_EQ(average_aoi(0.5), 2.0);
  EXPECT_EQ(average_aoi(0.25), 4.0);
  EXPECT_THROW(average_aoi(0.0), NumericError);
  double prev = average_aoi(0.01);
  for (int i = 2; i <= 100; ++i) {
    const double cur = average_aoi(i / 100.0);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(SimulateAoi, Examples) {
  EXPECT_EQ(simulate_aoi(1.0, 1000, 1).mean_age(), 1.0);
  for (double s : {0.5, 0.25, 0.1}) {
    const auto stats = simulate_aoi(s, 1'000'000, 17);
    EXPECT_NEAR(stats.mean_age(), 1.0 / s, 0.01 / s) << "S = " << s;
    EXPECT_EQ(stats.n_slots(), 1'000'000u);
  }
}

TEST(SimulateAoi, HistogramMassAndDeterminism) {
  const auto a = simulate_aoi(0.3, 50000, 4);
  const auto b = simulate_aoi(0.3, 50000, 4);
  EXPECT_EQ(a.histogram(), b.histogram());
  std::uint64_t mass = 0;
  for (auto c : a.histogram()) mass += c;
  EXPECT_EQ(mass, a.n_slots());
  EXPECT_GE(a.mean_age(), 1.0);
}

TEST(AoiProcess, FollowsRecursion) {
  AoiProcess p(0.5);
  EXPECT_EQ(p.current_age, 1u);
  EXPECT_EQ(p.advance(false), 2u);
  EXPECT_EQ(p.advance(false), 3u);
  EXPECT_EQ(p.advance(true), 1u);
  std::mt19937_64 rng(3);
  AoiProcess never(0.0);
  for (int i = 0; i < 10; ++i) never.advance(rng);
  EXPECT_EQ(never.current_age, 11u);
  EXPECT_THROW(AoiProcess(1.5), ArgumentError);
}

TEST(SimulateAoi, RecordEveryThins) {
  const auto all = simulate_aoi(0.4, 1000, 8);
  const auto thinned = simulate_aoi(0.4, 1000, 8, 10);
  EXPECT_EQ(thinned.n_slots(), 100u);
  EXPECT_THROW(simulate_aoi(0.4, 10, 8, 0), ArgumentError);
  EXPECT_EQ(all.n_slots(), 1000u);
}

// Ages of consecutive slots are strongly correlated, which inflates the tails of the
// Pearson statistic; the fit uses ages recorded far enough apart to be nearly independent.
TEST(SimulateAoi, HistogramFitsGeometricLaw) {
  for (double s : {0.1, 0.3, 0.5, 0.9}) {
    const auto gap = testing::decorrelation_gap(s);
    const auto stats = simulate_aoi(s, 100'000 * gap, 1234, gap);
    const auto fit = testing::chi_square_geometric(stats.histogram(), s);
    EXPECT_GT(fit.p_value, 0.01) << "S = " << s << " chi2 = " << fit.statistic << " dof = " << fit.dof;
  }
}

}  // namespace
}  // namespace specshare
