#include "prisched/delay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace prisched {

namespace {

double sum_log_mgf(std::span<const ArrivalModel> models, double u) {
  double s = 0.0;
  for (const auto& m : models) s += m.log_mgf(u);
  return s;
}

double sum_log_mgf_derivative(std::span<const ArrivalModel> models, double u) {
  double s = 0.0;
  for (const auto& m : models) s += m.log_mgf_derivative(u);
  return s;
}

// Largest root of f on (0, cap], given f(0) = 0 and f < 0 just right of 0.
ExponentResult largest_root(const std::function<double(double)>& f) {
  ExponentResult r;
  double lo = 0.0, hi = 1.0;
  while (f(hi) <= 0.0) {
    if (hi >= kExponentCap) {
      r.status = ExponentStatus::infinite;
      r.value = kInfinity;
      r.bracket_lo = hi;
      r.bracket_hi = kInfinity;
      return r;
    }
    lo = hi;
    hi *= 2.0;
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= 0.0 ? lo : hi) = mid;
  }
  r.status = ExponentStatus::finite;
  r.value = 0.5 * (lo + hi);
  r.residual = std::abs(f(r.value));
  return r;
}

void require_independent(const Traffic& traffic) {
  if (!traffic.is_independent()) throw InputError("delay analysis needs independent arrivals; shared-phase groups are not supported");
}

}  // namespace

bool ExponentResult::admits(double theta) const {
  if (theta <= 0.0) return true;
  switch (status) {
    case ExponentStatus::unstable:
      return false;
    case ExponentStatus::infinite:
      return true;
    case ExponentStatus::finite:
      return theta < value;
  }
  return false;
}

double inner_inf(std::span<const ArrivalModel> competitors, double theta) {
  if (!(theta >= 0.0)) throw InputError("theta must be nonnegative");
  if (theta == 0.0) return 0.0;
  auto g = [&](double u) { return sum_log_mgf(competitors, u) - u; };
  auto dg = [&](double u) { return sum_log_mgf_derivative(competitors, u) - 1.0; };
  if (dg(0.0) >= 0.0) return 0.0;
  if (dg(theta) <= 0.0) return g(theta);
  double lo = 0.0, hi = theta;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (dg(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::min({g(lo), g(hi), g(theta)});
}

ExponentResult delay_exponent(const ArrivalModel& own, std::span<const ArrivalModel> competitors) {
  double load = own.rate();
  for (const auto& m : competitors) load += m.rate();
  if (!(load < 1.0)) {
    ExponentResult r;
    r.status = ExponentStatus::unstable;
    r.value = 0.0;
    return r;
  }
  return largest_root([&](double t) { return own.log_mgf(t) + inner_inf(competitors, t); });
}

ExponentResult sum_queue_exponent(const ArrivalModel& own, std::span<const ArrivalModel> competitors) {
  double load = own.rate();
  for (const auto& m : competitors) load += m.rate();
  if (!(load < 1.0)) {
    ExponentResult r;
    r.status = ExponentStatus::unstable;
    return r;
  }
  return largest_root([&](double t) { return own.log_mgf(t) + sum_log_mgf(competitors, t) - t; });
}

ExponentResult delay_exponent_in(const InterferenceGraph& g, const Traffic& traffic, int link,
                                 const std::vector<char>& competes) {
  require_independent(traffic);
  g.check_link(link);
  if (traffic.size() != g.size()) throw InputError("traffic link count differs from graph");
  std::vector<ArrivalModel> comp;
  LinkSet set;
  for (int j : g.neighbors(link))
    if (competes[j]) {
      comp.push_back(traffic.models[j]);
      set.push_back(j);
    }
  auto r = delay_exponent(traffic.models[link], comp);
  r.competing_set = std::move(set);
  return r;
}

ExponentResult fixed_priority_exponent(const InterferenceGraph& g, const Traffic& traffic, int link, const Priority& p) {
  if (p.size() != g.size()) throw InputError("priority vector length differs from link count");
  std::vector<char> competes(g.size(), 0);
  for (int j = 0; j < g.size(); ++j) competes[j] = p.higher(j, link);
  return delay_exponent_in(g, traffic, link, competes);
}

ExponentResult worst_case_exponent(const InterferenceGraph& g, const Traffic& traffic, int link) {
  return delay_exponent_in(g, traffic, link, std::vector<char>(g.size(), 1));
}

bool delay_region_check(const InterferenceGraph& g, const Traffic& traffic, std::span<const double> theta,
                        const Priority& p) {
  if (theta.size() != static_cast<std::size_t>(g.size())) throw InputError("target vector length differs from link count");
  for (int i = 0; i < g.size(); ++i) {
    if (!(theta[i] >= 0.0) || !std::isfinite(theta[i])) throw InputError("delay targets must be finite and nonnegative");
    if (theta[i] == 0.0) continue;
    if (!fixed_priority_exponent(g, traffic, i, p).admits(theta[i])) return false;
  }
  return true;
}

namespace {

DelayPriorityResult assign_delay_priority(const InterferenceGraph& g, const Traffic& traffic,
                                          std::span<const double> theta, DelayOrdering ordering) {
  const int n = g.size();
  std::vector<double> target(theta.begin(), theta.end());
  std::vector<char> remaining(n, 1);
  std::vector<int> ranks(n, 0);
  DelayPriorityResult res;
  res.ordering_used = ordering;
  for (int k = 1; k <= n; ++k) {
    int pick = -1;
    if (ordering == DelayOrdering::zero_targets_first)
      for (int i = 0; i < n && pick < 0; ++i)
        if (remaining[i] && target[i] == 0.0) pick = i;
    for (int i = 0; i < n && pick < 0; ++i) {
      if (!remaining[i]) continue;
      std::vector<char> competes(n, 0);
      for (int j = 0; j < n; ++j) competes[j] = remaining[j] && target[j] > 0.0;
      if (delay_exponent_in(g, traffic, i, competes).admits(target[i])) pick = i;
    }
    if (pick < 0) {
      for (int i = 0; i < n; ++i)
        if (remaining[i]) res.stuck.push_back(i);
      return res;
    }
    ranks[pick] = n + 1 - k;
    remaining[pick] = 0;
    target[pick] = 0.0;
  }
  res.priority = Priority(std::move(ranks));
  res.feasible = delay_region_check(g, traffic, theta, res.priority);
  return res;
}

}  // namespace

DelayPriorityResult delay_priority(const InterferenceGraph& g, const Traffic& traffic, std::span<const double> theta,
                                   DelayOrdering ordering) {
  require_independent(traffic);
  if (theta.size() != static_cast<std::size_t>(g.size())) throw InputError("target vector length differs from link count");
  for (double t : theta)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("delay targets must be finite and nonnegative");
  auto res = assign_delay_priority(g, traffic, theta, ordering);
  if (!res.feasible && res.stuck.empty() && ordering == DelayOrdering::as_printed) {
    auto alt = assign_delay_priority(g, traffic, theta, DelayOrdering::zero_targets_first);
    if (alt.feasible) return alt;
  }
  return res;
}

double qos_to_exponent(double buffer, double eps) {
  if (!(buffer > 0.0) || !(eps > 0.0 && eps < 1.0)) throw InputError("QoS pair needs B > 0 and 0 < eps < 1");
  return -std::log(eps) / buffer;
}

OverflowEstimate fit_overflow(std::span<const std::int64_t> thresholds, std::span<const std::int64_t> counts,
                              std::int64_t measured_slots) {
  OverflowEstimate est;
  est.measured_slots = measured_slots;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t b = 0; b < thresholds.size(); ++b) {
    OverflowPoint pt;
    pt.threshold = thresholds[b];
    pt.count = counts[b];
    pt.frequency = measured_slots > 0 ? static_cast<double>(pt.count) / static_cast<double>(measured_slots) : 0.0;
    pt.low_confidence = pt.count < 50;
    if (pt.count > 0) {
      pt.neg_log = -std::log(pt.frequency);
      pt.used = true;
      const double x = static_cast<double>(pt.threshold);
      sx += x;
      sy += pt.neg_log;
      sxx += x * x;
      sxy += x * pt.neg_log;
      ++used;
    }
    est.points.push_back(pt);
  }
  est.infinite = used == 0;
  if (used >= 2) {
    const double denom = used * sxx - sx * sx;
    est.slope = denom != 0.0 ? (used * sxy - sx * sy) / denom : kInfinity;
  } else if (used == 1) {
    // One point: slope through the origin.
    const auto& p = *std::find_if(est.points.begin(), est.points.end(), [](const auto& q) { return q.used; });
    est.slope = p.threshold > 0 ? p.neg_log / static_cast<double>(p.threshold) : kInfinity;
  }
  return est;
}

OverflowEstimate estimate_overflow(const InterferenceGraph& g, const PrioritySpec& spec, const Traffic& traffic,
                                   int link, std::span<const std::int64_t> thresholds, std::int64_t total_slots,
                                   int reps, std::uint64_t seed) {
  g.check_link(link);
  if (reps < 1) throw InputError("replication count must be positive");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw InputError("thresholds must be increasing");
  RunConfig cfg;
  cfg.slots = std::max<std::int64_t>(1, total_slots / reps);
  cfg.seed = seed;
  cfg.thresholds.assign(thresholds.begin(), thresholds.end());
  const auto runs = run_replications(g, spec, traffic, cfg, reps);
  const auto pooled = merge(runs);
  return fit_overflow(thresholds, pooled.links[link].overflow_counts, pooled.measured_slots);
}

}  // namespace prisched
