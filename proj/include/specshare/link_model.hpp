#pragma once

#include <array>
#include <cstdint>

#include "specshare/active_set.hpp"
#include "specshare/rng.hpp"

namespace specshare {

// Per-link powers and gains. Index [i][k] refers to the link from transmitter i
// to receiver k; [i][i] is the T_i -> R_i link of a communicating pair.
struct LinkBudget {
  std::array<double, 3> tx_power{1.0, 1.0, 1.0};
  std::array<std::array<double, 3>, 3> path_gain{};
  std::array<std::array<double, 3>, 3> mean_fading{};
  double noise_power = 0.0;
  double sinr_threshold = 1.0;

  // Same g and h on every link.
  static LinkBudget uniform(std::array<double, 3> tx_power, double path_gain, double mean_fading,
                            double noise_power, double sinr_threshold);

  double& power(Node n) { return tx_power[slot_of(n)]; }
  double power(Node n) const { return tx_power[slot_of(n)]; }

  // Throws ArgumentError on a negative power, non-positive gain or threshold.
  void validate() const;
};

// Which printed form of the per-set success probability to evaluate.
enum class SuccessForm {
  // exp(-gamma sigma^2 / R(i,i)) * prod_j 1 / (1 + gamma R(j,i)/R(i,i))
  RayleighOutage,
  // Product factor without the reciprocal; kept only for side-by-side comparison.
  Literal,
};

// R(i,k) = P_i g(i,k) h(i,k).
double mean_received_power(Node transmitter, Node receiver, const LinkBudget& links);
double mean_received_power(int transmitter, int receiver, const LinkBudget& links);

// Probability that receiver R_i decodes T_i while every node of `active` transmits.
// `i` must be 1 or 2 and belong to `active`; returns 0 when R(i,i) = 0.
double success_prob_given_set(Node i, ActiveSet active, const LinkBudget& links,
                              SuccessForm form = SuccessForm::RayleighOutage);

// One instantaneous draw: exponential received powers, success iff SINR > gamma_min.
bool draw_sinr_success(Node i, ActiveSet active, const LinkBudget& links, Rng& rng);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t draws = 0;
};

// Monte Carlo counterpart of success_prob_given_set: every received power is an
// independent exponential variate with the configured mean, success is SINR > gamma_min.
McEstimate success_prob_mc_oracle(Node i, ActiveSet active, const LinkBudget& links,
                                  std::uint64_t n_draws, std::uint64_t seed);

// S_i conditioned on node i transmitting:
//   sum_{A contains i} S_i(A) P(A) / sum_{A contains i} P(A).
// Throws NumericError when node i never transmits under `dist`.
double average_success_prob(Node i, const EventDistribution& dist, const LinkBudget& links,
                            SuccessForm form = SuccessForm::RayleighOutage);

// Unconditioned average sum_A S_i(A) P(A), with S_i(A) = 0 when i is silent.
// This is the per-slot delivery probability that drives the age recursion.
double slot_success_prob(Node i, const EventDistribution& dist, const LinkBudget& links,
                         SuccessForm form = SuccessForm::RayleighOutage);

}  // namespace specshare
