#include "prisched/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace prisched {

namespace {

using Mask = std::uint64_t;

Mask bit(int i) { return Mask{1} << i; }

// Local adjacency masks for a vertex subset (at most 64 vertices).
std::vector<Mask> local_adjacency(const InterferenceGraph& g, std::span<const int> vertices) {
  std::vector<Mask> adj(vertices.size(), 0);
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (g.adjacent(vertices[a], vertices[b])) {
        adj[a] |= bit(static_cast<int>(b));
        adj[b] |= bit(static_cast<int>(a));
      }
    }
  }
  return adj;
}

int max_independent(Mask cand, const std::vector<Mask>& adj) {
  if (cand == 0) return 0;
  int best_v = -1, best_deg = 65;
  int hub = -1, hub_deg = -1;
  for (Mask m = cand; m; m &= m - 1) {
    int v = std::countr_zero(m);
    int d = std::popcount(adj[v] & cand);
    if (d < best_deg) best_deg = d, best_v = v;
    if (d > hub_deg) hub_deg = d, hub = v;
  }
  // A vertex of degree <= 1 always belongs to some maximum independent set.
  if (best_deg <= 1) return 1 + max_independent(cand & ~(adj[best_v] | bit(best_v)), adj);
  int with = 1 + max_independent(cand & ~(adj[hub] | bit(hub)), adj);
  int without = max_independent(cand & ~bit(hub), adj);
  return std::max(with, without);
}

void bron_kerbosch(Mask r, Mask p, Mask x, const std::vector<Mask>& compatible, std::vector<Mask>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  int pivot = -1, pivot_cover = -1;
  for (Mask m = p | x; m; m &= m - 1) {
    int u = std::countr_zero(m);
    int c = std::popcount(p & compatible[u]);
    if (c > pivot_cover) pivot_cover = c, pivot = u;
  }
  for (Mask m = p & ~compatible[pivot]; m; m &= m - 1) {
    int v = std::countr_zero(m);
    bron_kerbosch(r | bit(v), p & compatible[v], x & compatible[v], compatible, out);
    p &= ~bit(v);
    x |= bit(v);
  }
}

void check_cap(int size, int cap, const char* what) {
  if (size > cap) throw SizeLimitError(std::string(what) + ": size " + std::to_string(size) + " exceeds limit", cap);
}

}  // namespace

InterferenceGraph::InterferenceGraph(int link_count) : n_(link_count) {
  if (link_count < 0) throw InputError("link count must be nonnegative");
  adj_.assign(static_cast<std::size_t>(n_) * n_, 0);
  nbrs_.resize(n_);
}

InterferenceGraph InterferenceGraph::complete(int n) {
  InterferenceGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_conflict(i, j);
  return g;
}

InterferenceGraph InterferenceGraph::edgeless(int n) { return InterferenceGraph(n); }

InterferenceGraph InterferenceGraph::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  InterferenceGraph g(n);
  for (auto [i, j] : edges) g.add_conflict(i, j);
  return g;
}

void InterferenceGraph::check_link(int i) const {
  if (i < 0 || i >= n_) throw InputError("link index " + std::to_string(i + 1) + " out of range 1.." + std::to_string(n_));
}

bool InterferenceGraph::add_conflict(int i, int j) {
  check_link(i);
  check_link(j);
  if (i == j) throw InputError("self-conflict on link " + std::to_string(i + 1));
  if (adjacent(i, j)) return false;
  adj_[static_cast<std::size_t>(i) * n_ + j] = 1;
  adj_[static_cast<std::size_t>(j) * n_ + i] = 1;
  nbrs_[i].insert(std::lower_bound(nbrs_[i].begin(), nbrs_[i].end(), j), j);
  nbrs_[j].insert(std::lower_bound(nbrs_[j].begin(), nbrs_[j].end(), i), i);
  return true;
}

std::size_t InterferenceGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nb : nbrs_) total += nb.size();
  return total / 2;
}

std::vector<std::pair<int, int>> InterferenceGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j : nbrs_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

bool is_independent(const InterferenceGraph& g, std::span<const int> links) {
  for (int i : links) g.check_link(i);
  for (std::size_t a = 0; a < links.size(); ++a)
    for (std::size_t b = a + 1; b < links.size(); ++b)
      if (links[a] == links[b] || g.adjacent(links[a], links[b])) return false;
  return true;
}

std::vector<LinkSet> enumerate_maximal_sets(const InterferenceGraph& g, const Limits& limits) {
  const int n = g.size();
  check_cap(n, std::min(limits.enumeration_cap, 64), "maximal-set enumeration");
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  auto adj = local_adjacency(g, all);
  const Mask full = n == 64 ? ~Mask{0} : bit(n) - 1;
  std::vector<Mask> compatible(n);
  for (int v = 0; v < n; ++v) compatible[v] = full & ~adj[v] & ~bit(v);

  std::vector<Mask> raw;
  if (n > 0) bron_kerbosch(0, full, 0, compatible, raw);

  std::vector<LinkSet> sets;
  sets.reserve(raw.size());
  for (Mask m : raw) {
    LinkSet s;
    for (; m; m &= m - 1) s.push_back(std::countr_zero(m));
    sets.push_back(std::move(s));
  }
  std::sort(sets.begin(), sets.end());
  return sets;
}

const LinkSet& max_weight_among(std::span<const LinkSet> family, std::span<const double> weights) {
  if (family.empty()) throw InputError("empty maximal-set family");
  std::size_t best = 0;
  double best_w = -1.0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    double w = 0.0;
    for (int i : family[k]) w += weights[i];
    if (w > best_w) best_w = w, best = k;
  }
  return family[best];
}

LinkSet max_weight_independent_set(const InterferenceGraph& g, std::span<const double> weights,
                                   const Limits& limits) {
  if (weights.size() != static_cast<std::size_t>(g.size())) throw InputError("weight vector length mismatch");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be finite and nonnegative");
  if (g.size() == 0) return {};
  auto family = enumerate_maximal_sets(g, limits);
  return max_weight_among(family, weights);
}

int independence_number(const InterferenceGraph& g, std::span<const int> vertices) {
  check_cap(static_cast<int>(vertices.size()), 64, "independent-set search");
  auto adj = local_adjacency(g, vertices);
  Mask all = vertices.size() == 64 ? ~Mask{0} : bit(static_cast<int>(vertices.size())) - 1;
  return max_independent(all, adj);
}

int interference_degree(const InterferenceGraph& g, int i, const Limits& limits) {
  std::vector<char> alive(g.size(), 1);
  return interference_degree_within(g, i, alive, limits);
}

int interference_degree_within(const InterferenceGraph& g, int i, const std::vector<char>& alive,
                               const Limits& limits) {
  g.check_link(i);
  std::vector<int> closed{i};
  for (int j : g.neighbors(i))
    if (alive[j]) closed.push_back(j);
  check_cap(static_cast<int>(closed.size()), std::min(limits.enumeration_cap, 64), "closed neighborhood");
  return independence_number(g, closed);
}

LinkSet first_maximal_set(const InterferenceGraph& g) {
  LinkSet s;
  std::vector<char> blocked(g.size(), 0);
  for (int i = 0; i < g.size(); ++i) {
    if (blocked[i]) continue;
    s.push_back(i);
    for (int j : g.neighbors(i)) blocked[j] = 1;
  }
  return s;
}

int max_interference_degree(const InterferenceGraph& g, const Limits& limits) {
  int best = 0;
  for (int i = 0; i < g.size(); ++i) best = std::max(best, interference_degree(g, i, limits));
  return best;
}

namespace {

DeltaResult delta_greedy(const InterferenceGraph& g, const Limits& limits) {
  const int n = g.size();
  DeltaResult res;
  std::vector<char> alive(n, 1);
  for (int step = 0; step < n; ++step) {
    int pick = -1, pick_deg = 0;
    for (int i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      int d = interference_degree_within(g, i, alive, limits);
      if (pick < 0 || d < pick_deg) pick = i, pick_deg = d;
    }
    res.witness.order.push_back(pick);
    res.witness.per_step_degree.push_back(pick_deg);
    res.value = std::max(res.value, pick_deg);
    alive[pick] = 0;
  }
  return res;
}

DeltaResult delta_brute(const InterferenceGraph& g, const Limits& limits) {
  const int n = g.size();
  check_cap(n, limits.brute_force_cap, "brute-force delta");
  // degree[mask * n + v]: interference degree of v within the alive set `mask`.
  const std::size_t masks = std::size_t{1} << n;
  std::vector<int> degree(masks * n, 0);
  std::vector<char> alive(n);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    for (int v = 0; v < n; ++v) alive[v] = (mask >> v) & 1;
    for (int v = 0; v < n; ++v)
      if (alive[v]) degree[mask * n + v] = interference_degree_within(g, v, alive, limits);
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  DeltaResult best;
  best.value = n + 1;
  do {
    std::size_t mask = masks - 1;
    int worst = 0;
    for (int k = 0; k < n && worst < best.value; ++k) {
      worst = std::max(worst, degree[mask * n + perm[k]]);
      mask &= ~(std::size_t{1} << perm[k]);
    }
    if (worst < best.value) {
      best.value = worst;
      best.witness.order = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (n == 0) best.value = 0;
  std::size_t mask = masks - 1;
  for (int v : best.witness.order) {
    best.witness.per_step_degree.push_back(degree[mask * n + v]);
    mask &= ~(std::size_t{1} << v);
  }
  return best;
}

}  // namespace

DeltaResult compute_delta(const InterferenceGraph& g, DeltaMode mode, const Limits& limits) {
  return mode == DeltaMode::greedy ? delta_greedy(g, limits) : delta_brute(g, limits);
}

}  // namespace prisched
