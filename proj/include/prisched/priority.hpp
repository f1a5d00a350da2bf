#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "prisched/graph.hpp"

namespace prisched {

/// Priority ranks: rank(i) in 1..n, lower rank = higher priority, all distinct.
class Priority {
 public:
  Priority() = default;
  /// Throws InputError unless `ranks` is a permutation of 1..n.
  explicit Priority(std::vector<int> ranks);

  static Priority identity(int n);
  /// Priority whose service order (highest first) is `order`.
  static Priority from_order(std::span<const int> order);
  /// Links of `first` get the top ranks (in index order), the rest follow in index order.
  static Priority favoring(int n, std::span<const int> first);

  int size() const { return static_cast<int>(ranks_.size()); }
  int rank(int link) const { return ranks_[link]; }
  const std::vector<int>& ranks() const { return ranks_; }
  /// Links sorted from highest to lowest priority.
  std::vector<int> order() const;
  bool higher(int i, int j) const { return ranks_[i] < ranks_[j]; }

  bool operator==(const Priority&) const = default;

 private:
  std::vector<int> ranks_;
};

/// Finite distribution over priority vectors, sampled i.i.d. per slot.
struct PriorityDistribution {
  std::vector<Priority> priorities;
  std::vector<double> probabilities;

  void validate(int n) const;
};

struct LongestQueueFirst {};
struct MaxWeightPriority {};

using PrioritySpec = std::variant<Priority, PriorityDistribution, LongestQueueFirst, MaxWeightPriority>;

using RateVector = std::vector<double>;

/// Per-link subset S_i of the neighbor set N_i.
using SubsetChoice = std::vector<LinkSet>;

enum class Region { a_min, a_fixed, a_any, a_max };

struct MembershipResult {
  bool member = false;
  /// Peeling order (a_any) or the maximal slack found (a_max).
  std::vector<int> peel_order;
  double max_slack = 0.0;
  /// Links whose condition fails (a_min, a_fixed).
  std::vector<int> violations;
};

/// Sum over the neighbors of i with rank smaller than i's, plus a_i.
double fixed_priority_load(const InterferenceGraph& g, std::span<const double> a, const Priority& p, int i);

MembershipResult region_membership(const InterferenceGraph& g, std::span<const double> a, Region which,
                                   const Priority* p = nullptr, const Limits& limits = {});

/// Largest t such that a + t e is covered by a convex combination of maximal sets.
double max_uniform_slack(const InterferenceGraph& g, std::span<const double> a, const Limits& limits = {});

bool in_a_min(const InterferenceGraph& g, std::span<const double> a);
bool in_a_fixed(const InterferenceGraph& g, std::span<const double> a, const Priority& p);
bool in_a_any(const InterferenceGraph& g, std::span<const double> a);
bool in_a_max(const InterferenceGraph& g, std::span<const double> a, const Limits& limits = {});

struct StablePriorityResult {
  Priority priority;  // always filled (the assignment the greedy pass produced)
  bool feasible = false;
  std::vector<int> violations;  // links failing the fixed-priority condition when infeasible
};

/// Greedy lowest-priority-first assignment: repeatedly give the next lowest rank
/// to the remaining link minimizing a_s + sum over remaining neighbors, then
/// verify membership in the fixed-priority region.
StablePriorityResult stable_priority(const InterferenceGraph& g, std::span<const double> a);

/// Sufficient stability condition for an i.i.d. priority process:
/// a_i + sum_{N_i \ S_i} a_j < Pr(p_i < p_j for all j in S_i), every i.
bool check_lemma1(const InterferenceGraph& g, std::span<const double> a, const PriorityDistribution& dist,
                  const SubsetChoice& s);

/// Pr(p_i < p_j for all j in s_i) under dist.
double local_top_probability(const PriorityDistribution& dist, int i, std::span<const int> s_i);

struct EfficiencyFloor {
  double floor = 1.0;  // 1 / delta
  int delta = 1;
  RemovalSequence removal;
  Priority priority;  // p_{i_k} = n + 1 - k
};

/// 1/delta with its witness removal order (brute force when n <= brute cap).
EfficiencyFloor efficiency_floor(const InterferenceGraph& g, const Limits& limits = {});

/// Priority assigning the k-th removed link rank n + 1 - k.
Priority reverse_removal_priority(std::span<const int> removal_order);

}  // namespace prisched
