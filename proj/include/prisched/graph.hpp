#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "prisched/errors.hpp"

namespace prisched {

/// Sorted list of 0-based link indices.
using LinkSet = std::vector<int>;

/// Size caps for the exhaustive routines.
struct Limits {
  int enumeration_cap = 24;  // maximal-set enumeration, MWIS, neighborhood search
  int brute_force_cap = 8;   // factorial search over removal orders
};

/// Conflict graph over links. Links are 0-based internally; the text formats
/// are 1-based.
class InterferenceGraph {
 public:
  InterferenceGraph() = default;
  explicit InterferenceGraph(int link_count);

  static InterferenceGraph complete(int n);
  static InterferenceGraph edgeless(int n);
  static InterferenceGraph from_edges(int n, std::span<const std::pair<int, int>> edges);

  /// Adds the conflict {i, j}. Returns false if it was already present.
  bool add_conflict(int i, int j);

  int size() const { return n_; }
  bool adjacent(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  const std::vector<int>& neighbors(int i) const { return nbrs_[i]; }
  std::size_t edge_count() const;
  std::vector<std::pair<int, int>> edges() const;

  void check_link(int i) const;

  bool operator==(const InterferenceGraph& other) const { return n_ == other.n_ && adj_ == other.adj_; }

 private:
  int n_ = 0;
  std::vector<char> adj_;
  std::vector<std::vector<int>> nbrs_;
};

bool is_independent(const InterferenceGraph& g, std::span<const int> links);

/// Every maximal independent set, each sorted, in lexicographic order of the
/// sorted member lists.
std::vector<LinkSet> enumerate_maximal_sets(const InterferenceGraph& g, const Limits& limits = {});

/// Maximal independent set maximizing sum of weights; ties go to the
/// lexicographically smallest member list.
LinkSet max_weight_independent_set(const InterferenceGraph& g, std::span<const double> weights,
                                   const Limits& limits = {});

/// Same as above but over a precomputed family (as returned by enumerate_maximal_sets).
const LinkSet& max_weight_among(std::span<const LinkSet> family, std::span<const double> weights);

/// Size of the largest independent set among `vertices`.
int independence_number(const InterferenceGraph& g, std::span<const int> vertices);

/// Interference degree of link i: independence number of its closed neighborhood.
int interference_degree(const InterferenceGraph& g, int i, const Limits& limits = {});

/// Interference degree of i in the subgraph induced by the links with alive[j] set.
int interference_degree_within(const InterferenceGraph& g, int i, const std::vector<char>& alive,
                               const Limits& limits = {});

/// Lexicographically smallest maximal independent set (greedy by index).
LinkSet first_maximal_set(const InterferenceGraph& g);

struct RemovalSequence {
  std::vector<int> order;            // order[k] = link removed at step k
  std::vector<int> per_step_degree;  // interference degree at removal time
};

enum class DeltaMode { greedy, brute };

struct DeltaResult {
  int value = 0;
  RemovalSequence witness;
};

/// min over removal orders of the max per-step interference degree.
/// Greedy peels a minimum-degree link (lowest index on ties); brute tries all
/// orders and needs n <= limits.brute_force_cap.
DeltaResult compute_delta(const InterferenceGraph& g, DeltaMode mode = DeltaMode::greedy,
                          const Limits& limits = {});

/// Max over links of the interference degree.
int max_interference_degree(const InterferenceGraph& g, const Limits& limits = {});

}  // namespace prisched
