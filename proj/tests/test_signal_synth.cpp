#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "specshare/errors.hpp"
#include "specshare/rng.hpp"
#include "specshare/signal_synth.hpp"
#include "support/stats.hpp"

namespace specshare {
namespace {

double mean_power(const std::vector<Sample>& xs) {
  double sum = 0.0;
  for (const auto& x : xs) sum += std::norm(std::complex<double>(x));
  return sum / static_cast<double>(xs.size());
}

std::vector<IqPacket> many(std::size_t count, Label label, double snr_db, std::uint64_t seed,
                           std::size_t n = 64) {
  std::vector<IqPacket> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_packet(n, label, snr_db, derive_seed(seed, i)));
  return out;
}

TEST(GeneratePacket, NoiseOnlyHasUnitPower) {
  // |w|^2 is Exp(1); the mean over 128 samples has standard deviation 1/sqrt(128).
  const double four_sigma = 4.0 / std::sqrt(128.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = generate_packet(128, Label::NoSignal, 7.0, seed);
    EXPECT_NEAR(mean_power(p.samples), 1.0, four_sigma);
    EXPECT_EQ(mean_power(p.signal), 0.0);
    EXPECT_EQ(p.label, Label::NoSignal);
  }
}

TEST(GeneratePacket, HighSnrSignalDominates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = generate_packet(64, Label::Signal, 60.0, seed);
    const double c2 = std::norm(p.fading_coeff);
    if (c2 < 1e-3) continue;
    for (const auto& s : p.samples) {
      EXPECT_NEAR(std::norm(std::complex<double>(s)) / (1e6 * c2), 1.0, 0.05);
    }
  }
}

TEST(GeneratePacket, BpskSymbolsOnTheFadedAxis) {
  const auto p = generate_packet(32, Label::Signal, 3.0, 9);
  const std::complex<double> gain = std::sqrt(std::pow(10.0, 0.3)) * p.fading_coeff;
  for (const auto& s : p.signal) {
    const std::complex<double> symbol = std::complex<double>(s) / gain;
    EXPECT_NEAR(std::abs(symbol.real()), 1.0, 1e-5);
    EXPECT_NEAR(symbol.imag(), 0.0, 1e-5);
  }
}

TEST(GeneratePacket, DeterministicAndValidated) {
  const auto a = generate_packet(64, Label::Signal, 0.0, 123);
  const auto b = generate_packet(64, Label::Signal, 0.0, 123);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.fading_coeff, b.fading_coeff);
  EXPECT_NE(a.samples, generate_packet(64, Label::Signal, 0.0, 124).samples);
  EXPECT_THROW(generate_packet(0, Label::Signal, 0.0, 1), ArgumentError);
}

TEST(GeneratePacket, EnergyCalibration) {
  for (double snr : {-10.0, 0.0, 7.5}) {
    EXPECT_NEAR(measured_snr_db(many(10000, Label::Signal, snr, 31)), snr, 0.2) << snr;
  }
}

TEST(GeneratePacket, FadingMagnitudeIsRayleigh) {
  std::vector<double> mags;
  for (const auto& p : many(10000, Label::Signal, 0.0, 55, 4)) mags.push_back(std::abs(p.fading_coeff));
  const double d = testing::ks_statistic(mags, [](double r) { return 1.0 - std::exp(-r * r); });
  EXPECT_LT(d, testing::ks_critical_1pct(mags.size()));
}

TEST(Superpose, EqualPowersAddThreeDb) {
  const auto a = many(10000, Label::Signal, 0.0, 1);
  const auto b = many(10000, Label::Signal, 0.0, 2);
  std::vector<IqPacket> sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum.push_back(superpose(a[i], b[i]));
  EXPECT_NEAR(measured_snr_db(sum), 10.0 * std::log10(2.0), 0.2);
  EXPECT_NEAR(sum.front().snr_db, 10.0 * std::log10(2.0), 1e-12);
}

TEST(Superpose, ZeroSignalLeavesSnrUnchanged) {
  const auto a = many(10000, Label::Signal, 4.0, 3);
  const auto z = many(10000, Label::NoSignal, 0.0, 4);
  std::vector<IqPacket> sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum.push_back(superpose(a[i], z[i]));
  EXPECT_NEAR(measured_snr_db(sum), measured_snr_db(a), 0.1);
  EXPECT_EQ(sum.front().samples, a.front().samples);
}

TEST(Superpose, NoiseWithNoiseStaysNoise) {
  const auto a = generate_packet(128, Label::NoSignal, 0.0, 5);
  const auto b = generate_packet(128, Label::NoSignal, 0.0, 6);
  const auto s = superpose(a, b);
  EXPECT_EQ(s.label, Label::NoSignal);
  EXPECT_EQ(s.samples, a.samples);
  EXPECT_TRUE(std::isinf(s.snr_db));
}

TEST(Superpose, LengthMismatch) {
  EXPECT_THROW(superpose(generate_packet(16, Label::Signal, 0.0, 1),
                         generate_packet(32, Label::Signal, 0.0, 1)),
               ArgumentError);
}

TEST(GenerateDataset, CountsBalanceAndShuffle) {
  const auto d = generate_dataset(1000, 64, 0.0, 0.5, 8);
  ASSERT_EQ(d.size(), 2000u);
  EXPECT_NEAR(d.class_balance(), 0.5, 1e-3);
  std::size_t signal_in_first_half = 0;
  for (std::size_t i = 0; i < 1000; ++i) signal_in_first_half += d.packets[i].label == Label::Signal;
  EXPECT_GT(signal_in_first_half, 400u);
  EXPECT_LT(signal_in_first_half, 600u);
  for (const auto& p : d.packets) EXPECT_EQ(p.size(), 64u);
}

TEST(GenerateDataset, UnevenBalance) {
  const auto d = generate_dataset(500, 16, 0.0, 0.3, 8);
  EXPECT_NEAR(d.class_balance(), 0.3, 1e-3);
}

TEST(GenerateDataset, PureFunctionOfManifest) {
  const auto a = generate_dataset(200, 32, std::vector<double>{-5.0, 5.0}, 0.5, 77);
  const auto b = regenerate(DatasetManifest::parse(a.manifest.to_text()));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.packets[i].samples, b.packets[i].samples);
    EXPECT_EQ(a.packets[i].label, b.packets[i].label);
  }
  EXPECT_EQ(a.manifest, b.manifest);
  EXPECT_THROW(generate_dataset(0, 32, 0.0, 0.5, 1), ArgumentError);
}

TEST(DatasetFiles, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "specshare_dataset_test";
  std::filesystem::create_directories(dir);
  const auto base = dir / "set";
  const auto d = generate_dataset(50, 16, 3.0, 0.5, 4);
  write_dataset(d, base);
  EXPECT_EQ(std::filesystem::file_size(dir / "set.iq"), 100u * 16u * 8u);

  const auto back = read_dataset(base);
  EXPECT_EQ(back.manifest, d.manifest);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.packets[i].samples, d.packets[i].samples);
    EXPECT_EQ(back.packets[i].label, d.packets[i].label);
  }
  std::filesystem::remove_all(dir);
}

TEST(DatasetFiles, Errors) {
  EXPECT_THROW(read_dataset("/nonexistent/specshare/base"), ConfigError);
  EXPECT_THROW(DatasetManifest::parse("version=1\nbogus=3\n"), ConfigError);
}

}  // namespace
}  // namespace specshare
