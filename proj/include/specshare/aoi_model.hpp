#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace specshare {

// Age histogram and running mean of a slotted age process. Ages start at 1.
class AoiStats {
 public:
  void record(std::uint64_t age);

  double mean_age() const;
  std::uint64_t n_slots() const { return n_slots_; }
  // histogram()[k] counts slots that ended with age k; index 0 is unused.
  const std::vector<std::uint64_t>& histogram() const { return histogram_; }
  // Standard error of the mean age, estimated from non-overlapping batch means.
  double mean_std_error() const;

 private:
  std::uint64_t n_slots_ = 0;
  double age_sum_ = 0.0;
  std::vector<std::uint64_t> histogram_;
  std::vector<double> batch_means_;
  double batch_sum_ = 0.0;
  std::uint64_t batch_fill_ = 0;
};

// One step of the age recursion: 1 after a delivery, age + 1 otherwise.
std::uint64_t aoi_step(std::uint64_t age, bool success);

// Age of one receiver whose deliveries succeed independently with probability S per slot.
struct AoiProcess {
  std::uint64_t current_age = 1;
  double success_prob = 0.0;

  explicit AoiProcess(double s);  // throws ArgumentError unless S is in [0,1]

  std::uint64_t advance(bool success) { return current_age = aoi_step(current_age, success); }
  template <typename Urbg>
  std::uint64_t advance(Urbg& rng) {
    return advance(std::bernoulli_distribution(success_prob)(rng));
  }
};

// Stationary probability of age k for per-slot delivery probability S: (1-S)^(k-1) S.
double steady_state_prob(double success_prob, std::uint64_t k);

// Stationary mean age 1/S.
double average_aoi(double success_prob);

// Runs the recursion with independent per-slot deliveries of probability S. With
// record_every > 1 only every record_every-th slot's age is recorded; ages that far apart
// have correlation (1-S)^record_every, so a large enough interval yields nearly
// independent samples of the stationary law.
AoiStats simulate_aoi(double success_prob, std::uint64_t n_slots, std::uint64_t seed,
                      std::uint64_t record_every = 1);

}  // namespace specshare
