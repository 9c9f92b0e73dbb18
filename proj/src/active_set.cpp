#include "specshare/active_set.hpp"

#include <cmath>

#include <fmt/format.h>

#include "specshare/errors.hpp"

namespace specshare {

Node node_from_index(int index) {
  if (index < 1 || index > 3) {
    throw ArgumentError(fmt::format("node index {} is not in {{1,2,3}}", index));
  }
  return static_cast<Node>(index);
}

ActiveSet ActiveSet::from_mask(unsigned mask) {
  if (mask >= static_cast<unsigned>(kCount)) {
    throw ArgumentError(fmt::format("active-set mask {} exceeds 3 bits", mask));
  }
  return ActiveSet(mask);
}

std::string ActiveSet::to_string() const {
  std::string out = "{";
  for (Node n : kAllNodes) {
    if (!contains(n)) continue;
    if (out.size() > 1) out += ',';
    out += static_cast<char>('0' + index_of(n));
  }
  return out + "}";
}

std::string ActiveSet::label() const {
  if (empty()) return "none";
  std::string out;
  for (Node n : kAllNodes) {
    if (contains(n)) out += static_cast<char>('0' + index_of(n));
  }
  return out;
}

EventDistribution::EventDistribution(const std::array<double, ActiveSet::kCount>& mass)
    : mass_(mass) {}

double EventDistribution::total() const {
  double sum = 0.0;
  for (double m : mass_) sum += m;
  return sum;
}

double EventDistribution::marginal(Node n) const {
  double sum = 0.0;
  for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
    if (ActiveSet::from_mask(m).contains(n)) sum += mass_[m];
  }
  return sum;
}

void EventDistribution::validate(double tol) const {
  for (unsigned m = 0; m < ActiveSet::kCount; ++m) {
    if (!(mass_[m] >= 0.0 && mass_[m] <= 1.0)) {
      throw ArgumentError(fmt::format("mass of {} is {} (outside [0,1])",
                                      ActiveSet::from_mask(m).to_string(), mass_[m]));
    }
  }
  if (std::abs(total() - 1.0) > tol) {
    throw ArgumentError(fmt::format("event distribution sums to {:.17g}, not 1", total()));
  }
}

}  // namespace specshare
