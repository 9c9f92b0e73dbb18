#include "specshare/link_model.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "specshare/errors.hpp"

namespace specshare {

namespace {

void require_pair_node(Node i) {
  if (i != Node::Incumbent && i != Node::Secondary) {
    throw ArgumentError(fmt::format("node {} has no intended receiver", index_of(i)));
  }
}

void require_member(Node i, ActiveSet active) {
  if (!active.contains(i)) {
    throw ArgumentError(
        fmt::format("node {} is not in active set {}", index_of(i), active.to_string()));
  }
}

}  // namespace

LinkBudget LinkBudget::uniform(std::array<double, 3> tx_power, double path_gain,
                               double mean_fading, double noise_power, double sinr_threshold) {
  LinkBudget links;
  links.tx_power = tx_power;
  for (auto& row : links.path_gain) row.fill(path_gain);
  for (auto& row : links.mean_fading) row.fill(mean_fading);
  links.noise_power = noise_power;
  links.sinr_threshold = sinr_threshold;
  return links;
}

void LinkBudget::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(tx_power[i] >= 0.0)) {
      throw ArgumentError(fmt::format("tx_power[{}] = {} must be >= 0", i + 1, tx_power[i]));
    }
    for (int k = 0; k < 3; ++k) {
      if (!(path_gain[i][k] > 0.0) || !(mean_fading[i][k] > 0.0)) {
        throw ArgumentError(fmt::format("gains of link ({},{}) must be > 0", i + 1, k + 1));
      }
    }
  }
  if (!(noise_power >= 0.0)) throw ArgumentError("noise_power must be >= 0");
  if (!(sinr_threshold > 0.0)) throw ArgumentError("sinr_threshold must be > 0");
}

double mean_received_power(Node transmitter, Node receiver, const LinkBudget& links) {
  const int t = slot_of(node_from_index(index_of(transmitter)));
  const int r = slot_of(node_from_index(index_of(receiver)));
  return links.tx_power[t] * links.path_gain[t][r] * links.mean_fading[t][r];
}

double mean_received_power(int transmitter, int receiver, const LinkBudget& links) {
  return mean_received_power(node_from_index(transmitter), node_from_index(receiver), links);
}

double success_prob_given_set(Node i, ActiveSet active, const LinkBudget& links,
                              SuccessForm form) {
  require_pair_node(i);
  require_member(i, active);
  const double own = mean_received_power(i, i, links);
  if (own <= 0.0) return 0.0;

  const double gamma = links.sinr_threshold;
  double prob = std::exp(-gamma * links.noise_power / own);
  for (Node j : kAllNodes) {
    if (j == i || !active.contains(j)) continue;
    const double factor = 1.0 + gamma * mean_received_power(j, i, links) / own;
    prob = form == SuccessForm::RayleighOutage ? prob / factor : prob * factor;
  }
  return prob;
}

bool draw_sinr_success(Node i, ActiveSet active, const LinkBudget& links, Rng& rng) {
  std::exponential_distribution<double> unit_exp(1.0);
  const double signal = mean_received_power(i, i, links) * unit_exp(rng);
  double interference = links.noise_power;
  for (Node j : kAllNodes) {
    if (j == i || !active.contains(j)) continue;
    const double mean = mean_received_power(j, i, links);
    if (mean > 0.0) interference += mean * unit_exp(rng);
  }
  return signal > links.sinr_threshold * interference;
}

McEstimate success_prob_mc_oracle(Node i, ActiveSet active, const LinkBudget& links,
                                  std::uint64_t n_draws, std::uint64_t seed) {
  require_pair_node(i);
  require_member(i, active);
  if (n_draws == 0) throw ArgumentError("n_draws must be >= 1");

  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t d = 0; d < n_draws; ++d) {
    if (draw_sinr_success(i, active, links, rng)) ++hits;
  }
  const double n = static_cast<double>(n_draws);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), n_draws};
}

double slot_success_prob(Node i, const EventDistribution& dist, const LinkBudget& links,
                         SuccessForm form) {
  require_pair_node(i);
  double sum = 0.0;
  for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
    const ActiveSet a = ActiveSet::from_mask(m);
    if (!a.contains(i) || dist[a] == 0.0) continue;
    sum += success_prob_given_set(i, a, links, form) * dist[a];
  }
  return sum;
}

double average_success_prob(Node i, const EventDistribution& dist, const LinkBudget& links,
                            SuccessForm form) {
  require_pair_node(i);
  const double attempt = dist.marginal(i);
  if (attempt <= 0.0) {
    throw NumericError(fmt::format("node {} never transmits", index_of(i)));
  }
  return slot_success_prob(i, dist, links, form) / attempt;
}

}  // namespace specshare
