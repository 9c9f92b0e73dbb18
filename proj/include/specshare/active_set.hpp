#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>

namespace specshare {

// Node 1 is the incumbent, 2 the secondary, 3 the jammer.
enum class Node : int { Incumbent = 1, Secondary = 2, Jammer = 3 };

inline constexpr std::array<Node, 3> kAllNodes = {Node::Incumbent, Node::Secondary,
                                                  Node::Jammer};

// Throws ArgumentError unless 1 <= index <= 3.
Node node_from_index(int index);

constexpr int index_of(Node n) { return static_cast<int>(n); }
constexpr int slot_of(Node n) { return static_cast<int>(n) - 1; }

// Subset of {1,2,3} stored as a 3-bit mask (bit i-1 set when node i is active).
class ActiveSet {
 public:
  static constexpr int kCount = 8;

  constexpr ActiveSet() = default;
  constexpr ActiveSet(std::initializer_list<Node> nodes) {
    for (Node n : nodes) mask_ |= bit(n);
  }
  static ActiveSet from_mask(unsigned mask);

  constexpr unsigned mask() const { return mask_; }
  constexpr bool contains(Node n) const { return (mask_ & bit(n)) != 0; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const {
    return static_cast<int>((mask_ & 1u) + ((mask_ >> 1) & 1u) + ((mask_ >> 2) & 1u));
  }
  constexpr ActiveSet with(Node n) const { return ActiveSet(mask_ | bit(n)); }
  constexpr ActiveSet without(Node n) const { return ActiveSet(mask_ & ~bit(n)); }

  // "{}", "{1}", "{1,2,3}", ...
  std::string to_string() const;
  // Column-friendly label: "none", "1", "12", "123", ...
  std::string label() const;

  friend constexpr bool operator==(ActiveSet, ActiveSet) = default;

 private:
  constexpr explicit ActiveSet(unsigned mask) : mask_(mask) {}
  static constexpr unsigned bit(Node n) { return 1u << (static_cast<unsigned>(n) - 1u); }

  unsigned mask_ = 0;
};

// Probability mass over the 8 subsets of {1,2,3}, indexed by mask.
class EventDistribution {
 public:
  EventDistribution() = default;
  explicit EventDistribution(const std::array<double, ActiveSet::kCount>& mass);

  double operator[](ActiveSet a) const { return mass_[a.mask()]; }
  double& operator[](ActiveSet a) { return mass_[a.mask()]; }
  const std::array<double, ActiveSet::kCount>& masses() const { return mass_; }

  double total() const;
  // Sum of the mass on sets containing node n.
  double marginal(Node n) const;

  // Throws ArgumentError when a mass is outside [0,1] or the total is off by more than tol.
  void validate(double tol = 1e-12) const;

 private:
  std::array<double, ActiveSet::kCount> mass_{};
};

}  // namespace specshare
