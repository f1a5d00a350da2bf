#include "prisched/priority.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "prisched/lp.hpp"

namespace prisched {

Priority::Priority(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  std::vector<char> seen(ranks_.size() + 1, 0);
  for (int r : ranks_) {
    if (r < 1 || r > static_cast<int>(ranks_.size()) || seen[r])
      throw InputError("priority ranks must be a permutation of 1..n");
    seen[r] = 1;
  }
}

Priority Priority::identity(int n) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 1);
  return Priority(std::move(r));
}

Priority Priority::from_order(std::span<const int> order) {
  std::vector<int> r(order.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] < 0 || order[k] >= static_cast<int>(order.size())) throw InputError("priority order has an out-of-range link");
    r[order[k]] = static_cast<int>(k) + 1;
  }
  return Priority(std::move(r));
}

Priority Priority::favoring(int n, std::span<const int> first) {
  std::vector<int> order;
  std::vector<char> taken(n, 0);
  for (int i : first) {
    order.push_back(i);
    taken[i] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (!taken[i]) order.push_back(i);
  return from_order(order);
}

std::vector<int> Priority::order() const {
  std::vector<int> o(ranks_.size());
  for (std::size_t i = 0; i < ranks_.size(); ++i) o[ranks_[i] - 1] = static_cast<int>(i);
  return o;
}

void PriorityDistribution::validate(int n) const {
  if (priorities.empty() || priorities.size() != probabilities.size())
    throw InputError("priority distribution needs matching non-empty priority/probability lists");
  double total = 0.0;
  for (std::size_t k = 0; k < priorities.size(); ++k) {
    if (priorities[k].size() != n) throw InputError("priority vector length differs from link count");
    if (!(probabilities[k] >= 0.0)) throw InputError("priority probabilities must be nonnegative");
    total += probabilities[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("priority probabilities must sum to 1");
}

namespace {

void check_rates(const InterferenceGraph& g, std::span<const double> a) {
  if (a.size() != static_cast<std::size_t>(g.size())) throw InputError("rate vector length differs from link count");
  for (double v : a)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("rates must be finite and nonnegative");
}

double closed_load(const InterferenceGraph& g, std::span<const double> a, int i) {
  double s = a[i];
  for (int j : g.neighbors(i)) s += a[j];
  return s;
}

}  // namespace

double fixed_priority_load(const InterferenceGraph& g, std::span<const double> a, const Priority& p, int i) {
  double s = a[i];
  for (int j : g.neighbors(i))
    if (p.higher(j, i)) s += a[j];
  return s;
}

bool in_a_min(const InterferenceGraph& g, std::span<const double> a) {
  return region_membership(g, a, Region::a_min).member;
}

bool in_a_fixed(const InterferenceGraph& g, std::span<const double> a, const Priority& p) {
  return region_membership(g, a, Region::a_fixed, &p).member;
}

bool in_a_any(const InterferenceGraph& g, std::span<const double> a) {
  return region_membership(g, a, Region::a_any).member;
}

bool in_a_max(const InterferenceGraph& g, std::span<const double> a, const Limits& limits) {
  return region_membership(g, a, Region::a_max, nullptr, limits).member;
}

double max_uniform_slack(const InterferenceGraph& g, std::span<const double> a, const Limits& limits) {
  const int n = g.size();
  if (n == 0) return std::numeric_limits<double>::infinity();
  auto family = enumerate_maximal_sets(g, limits);
  const int k = static_cast<int>(family.size());
  const double shift = *std::max_element(a.begin(), a.end()) + 1.0;  // t' = t + shift >= 0
  LinearProgram lp;
  lp.objective.assign(k + 1, 0.0);
  lp.objective[k] = 1.0;
  for (int i = 0; i < n; ++i) {
    LpRow row;
    row.coeffs.assign(k + 1, 0.0);
    for (int s = 0; s < k; ++s)
      if (std::binary_search(family[s].begin(), family[s].end(), i)) row.coeffs[s] = 1.0;
    row.coeffs[k] = -1.0;
    row.sense = RowSense::greater_equal;
    row.rhs = a[i] - shift;
    lp.rows.push_back(std::move(row));
  }
  LpRow budget;
  budget.coeffs.assign(k + 1, 1.0);
  budget.coeffs[k] = 0.0;
  budget.rhs = 1.0;
  lp.rows.push_back(std::move(budget));
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) throw InputError("slack LP did not reach an optimum");
  return sol.value - shift;
}

MembershipResult region_membership(const InterferenceGraph& g, std::span<const double> a, Region which,
                                   const Priority* p, const Limits& limits) {
  check_rates(g, a);
  const int n = g.size();
  MembershipResult res;
  switch (which) {
    case Region::a_min:
      for (int i = 0; i < n; ++i)
        if (!(closed_load(g, a, i) < 1.0)) res.violations.push_back(i);
      res.member = res.violations.empty();
      break;
    case Region::a_fixed:
      if (!p || p->size() != n) throw InputError("fixed-priority region needs a priority vector of matching length");
      for (int i = 0; i < n; ++i)
        if (!(fixed_priority_load(g, a, *p, i) < 1.0)) res.violations.push_back(i);
      res.member = res.violations.empty();
      break;
    case Region::a_any: {
      std::vector<double> rem(a.begin(), a.end());
      bool progress = true;
      while (progress) {
        progress = false;
        for (int i = 0; i < n; ++i) {
          if (rem[i] > 0.0 && closed_load(g, rem, i) < 1.0) {
            rem[i] = 0.0;
            res.peel_order.push_back(i);
            progress = true;
            break;
          }
        }
      }
      res.member = std::all_of(rem.begin(), rem.end(), [](double v) { return v == 0.0; });
      break;
    }
    case Region::a_max:
      res.max_slack = max_uniform_slack(g, a, limits);
      res.member = res.max_slack > 1e-12;
      break;
  }
  return res;
}

StablePriorityResult stable_priority(const InterferenceGraph& g, std::span<const double> a) {
  check_rates(g, a);
  const int n = g.size();
  std::vector<char> remaining(n, 1);
  std::vector<int> ranks(n, 0);
  for (int k = 1; k <= n; ++k) {
    int pick = -1;
    double pick_load = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!remaining[i]) continue;
      double load = a[i];
      for (int j : g.neighbors(i))
        if (remaining[j]) load += a[j];
      if (pick < 0 || load < pick_load) pick = i, pick_load = load;
    }
    ranks[pick] = n + 1 - k;
    remaining[pick] = 0;
  }
  StablePriorityResult res;
  res.priority = Priority(std::move(ranks));
  auto check = region_membership(g, a, Region::a_fixed, &res.priority);
  res.feasible = check.member;
  res.violations = std::move(check.violations);
  return res;
}

double local_top_probability(const PriorityDistribution& dist, int i, std::span<const int> s_i) {
  double prob = 0.0;
  for (std::size_t k = 0; k < dist.priorities.size(); ++k) {
    const auto& p = dist.priorities[k];
    if (std::all_of(s_i.begin(), s_i.end(), [&](int j) { return p.higher(i, j); })) prob += dist.probabilities[k];
  }
  return prob;
}

bool check_lemma1(const InterferenceGraph& g, std::span<const double> a, const PriorityDistribution& dist,
                  const SubsetChoice& s) {
  check_rates(g, a);
  const int n = g.size();
  dist.validate(n);
  if (s.size() != static_cast<std::size_t>(n)) throw InputError("subset choice needs one set per link");
  for (int i = 0; i < n; ++i)
    for (int j : s[i])
      if (!g.adjacent(i, j)) throw InputError("S_" + std::to_string(i + 1) + " is not a subset of N_" + std::to_string(i + 1));

  for (int i = 0; i < n; ++i) {
    double load = a[i];
    for (int j : g.neighbors(i))
      if (std::find(s[i].begin(), s[i].end(), j) == s[i].end()) load += a[j];
    if (!(load < local_top_probability(dist, i, s[i]))) return false;
  }
  return true;
}

Priority reverse_removal_priority(std::span<const int> removal_order) {
  const int n = static_cast<int>(removal_order.size());
  std::vector<int> ranks(n);
  for (int k = 0; k < n; ++k) ranks[removal_order[k]] = n - k;
  return Priority(std::move(ranks));
}

EfficiencyFloor efficiency_floor(const InterferenceGraph& g, const Limits& limits) {
  const auto mode = g.size() <= limits.brute_force_cap ? DeltaMode::brute : DeltaMode::greedy;
  auto d = compute_delta(g, mode, limits);
  EfficiencyFloor res;
  res.delta = std::max(d.value, 1);
  res.floor = 1.0 / res.delta;
  res.priority = reverse_removal_priority(d.witness.order);
  res.removal = std::move(d.witness);
  return res;
}

}  // namespace prisched
