#include "specshare/aoi_model.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "specshare/errors.hpp"
#include "specshare/rng.hpp"

namespace specshare {

namespace {
constexpr std::uint64_t kBatchLength = 1000;
}

void AoiStats::record(std::uint64_t age) {
  if (age >= histogram_.size()) histogram_.resize(age + 1, 0);
  ++histogram_[age];
  ++n_slots_;
  const auto a = static_cast<double>(age);
  age_sum_ += a;
  batch_sum_ += a;
  if (++batch_fill_ == kBatchLength) {
    batch_means_.push_back(batch_sum_ / static_cast<double>(kBatchLength));
    batch_sum_ = 0.0;
    batch_fill_ = 0;
  }
}

double AoiStats::mean_age() const {
  return n_slots_ == 0 ? 0.0 : age_sum_ / static_cast<double>(n_slots_);
}

double AoiStats::mean_std_error() const {
  const std::size_t b = batch_means_.size();
  if (b < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(batch_means_.begin(), batch_means_.end(), 0.0) / b;
  double ss = 0.0;
  for (double x : batch_means_) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

std::uint64_t aoi_step(std::uint64_t age, bool success) {
  if (age < 1) throw ArgumentError("age must be >= 1");
  return success ? 1 : age + 1;
}

double steady_state_prob(double success_prob, std::uint64_t k) {
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw NumericError(fmt::format("no steady state for S = {}", success_prob));
  }
  if (k < 1) throw ArgumentError("age k must be >= 1");
  return std::pow(1.0 - success_prob, static_cast<double>(k - 1)) * success_prob;
}

double average_aoi(double success_prob) {
  if (success_prob == 0.0) throw NumericError("S = 0: the age grows without bound");
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw ArgumentError(fmt::format("S = {} is not a probability", success_prob));
  }
  return 1.0 / success_prob;
}

AoiProcess::AoiProcess(double s) : success_prob(s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ArgumentError(fmt::format("S = {} is not a probability", s));
}

AoiStats simulate_aoi(double success_prob, std::uint64_t n_slots, std::uint64_t seed,
                      std::uint64_t record_every) {
  if (n_slots < 1) throw ArgumentError("n_slots must be >= 1");
  if (record_every < 1) throw ArgumentError("record_every must be >= 1");
  if (!(success_prob >= 0.0 && success_prob <= 1.0)) {
    throw ArgumentError(fmt::format("S = {} is not a probability", success_prob));
  }
  Rng rng(seed);
  std::bernoulli_distribution delivery(success_prob);
  AoiStats stats;
  AoiProcess process(success_prob);
  for (std::uint64_t t = 0; t < n_slots; ++t) {
    const std::uint64_t age = process.advance(delivery(rng));
    if ((t + 1) % record_every == 0) stats.record(age);
  }
  return stats;
}

}  // namespace specshare
