#include "prisched/engine.hpp"

#include <algorithm>
#include <future>
#include <numeric>

namespace prisched {

SimState SimState::with_queues(std::vector<std::int64_t> q) {
  SimState s(static_cast<int>(q.size()));
  for (auto v : q)
    if (v < 0) throw InputError("initial queues must be nonnegative");
  s.initial = q;
  s.queues = std::move(q);
  return s;
}

namespace {

LinkSet schedule_in_order(const InterferenceGraph& g, std::span<const std::int64_t> queues,
                          std::span<const int> order) {
  LinkSet chosen;
  for (int i : order) {
    if (queues[i] <= 0) continue;
    const bool blocked = std::any_of(chosen.begin(), chosen.end(), [&](int j) { return g.adjacent(i, j); });
    if (!blocked) chosen.push_back(i);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<int> lqf_order(std::span<const std::int64_t> queues) {
  std::vector<int> order(queues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return queues[a] > queues[b]; });
  return order;
}

}  // namespace

LinkSet prioritized_maximal_schedule(const InterferenceGraph& g, std::span<const std::int64_t> queues,
                                     const Priority& p) {
  if (p.size() != g.size() || queues.size() != static_cast<std::size_t>(g.size()))
    throw InputError("schedule inputs disagree on link count");
  const auto order = p.order();
  return schedule_in_order(g, queues, order);
}

Scheduler::Scheduler(const InterferenceGraph& g, PrioritySpec spec, std::uint64_t seed, const Limits& limits)
    : g_(g), spec_(std::move(spec)), rng_(derive_seed(seed, stream_purpose::priority)) {
  const int n = g_.size();
  if (auto* p = std::get_if<Priority>(&spec_)) {
    if (p->size() != n) throw InputError("priority vector length differs from link count");
  } else if (auto* d = std::get_if<PriorityDistribution>(&spec_)) {
    d->validate(n);
    double acc = 0.0;
    for (double q : d->probabilities) cumulative_.push_back(acc += q);
  } else if (std::holds_alternative<MaxWeightPriority>(spec_)) {
    family_ = enumerate_maximal_sets(g_, limits);
  }
}

Priority Scheduler::resolve(std::span<const std::int64_t> queues) {
  return std::visit(
      [&](const auto& s) -> Priority {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Priority>) {
          return s;
        } else if constexpr (std::is_same_v<T, PriorityDistribution>) {
          const double u = rng_.uniform() * cumulative_.back();
          auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
          const auto k = std::min<std::size_t>(it - cumulative_.begin(), s.priorities.size() - 1);
          return s.priorities[k];
        } else if constexpr (std::is_same_v<T, LongestQueueFirst>) {
          return Priority::from_order(lqf_order(queues));
        } else {
          std::vector<double> w(queues.begin(), queues.end());
          return Priority::favoring(g_.size(), max_weight_among(family_, w));
        }
      },
      spec_);
}

LinkSet Scheduler::step(SimState& state, std::span<const int> arrivals) {
  const int n = g_.size();
  if (state.size() != n || arrivals.size() != static_cast<std::size_t>(n))
    throw InputError("state or arrival vector length differs from link count");
  LinkSet chosen;
  if (auto* p = std::get_if<Priority>(&spec_)) {
    if (fixed_order_.empty() && n > 0) fixed_order_ = p->order();
    chosen = schedule_in_order(g_, state.queues, fixed_order_);
  } else {
    chosen = prioritized_maximal_schedule(g_, state.queues, resolve(state.queues));
  }
  for (int i : chosen) {
    --state.queues[i];
    ++state.cum_departures[i];
  }
  for (int i = 0; i < n; ++i) {
    state.queues[i] += arrivals[i];
    state.cum_arrivals[i] += arrivals[i];
  }
  ++state.slot;
  return chosen;
}

LinkSet Scheduler::step(SimState& state, TrafficSource& source) {
  arrivals_buf_.resize(g_.size());
  source.next(arrivals_buf_);
  return step(state, arrivals_buf_);
}

double RunStats::overflow_frequency(int link, std::size_t threshold_index) const {
  if (measured_slots == 0) return 0.0;
  return static_cast<double>(links[link].overflow_counts[threshold_index]) / static_cast<double>(measured_slots);
}

RunStats run(const InterferenceGraph& g, const PrioritySpec& spec, const Traffic& traffic, const RunConfig& cfg,
             const TraceFn& trace) {
  if (cfg.slots < 1) throw InputError("slots must be at least 1");
  if (traffic.size() != g.size()) throw InputError("traffic link count differs from graph");
  if (!(cfg.burn_in_fraction >= 0.0 && cfg.burn_in_fraction < 1.0)) throw InputError("burn-in fraction must be in [0,1)");
  const int n = g.size();
  Scheduler sched(g, spec, cfg.seed, cfg.limits);
  TrafficSource source(traffic, cfg.seed);
  SimState state(n);
  const auto burn_in = static_cast<std::int64_t>(static_cast<double>(cfg.slots) * cfg.burn_in_fraction);

  RunStats stats;
  stats.slots = cfg.slots;
  stats.thresholds = cfg.thresholds;
  stats.links.assign(n, LinkStats{});
  for (auto& l : stats.links) l.overflow_counts.assign(cfg.thresholds.size(), 0);

  for (std::int64_t t = 1; t <= cfg.slots; ++t) {
    const auto chosen = sched.step(state, source);
    if (trace) trace(state, chosen);
    for (int i = 0; i < n; ++i) {
      const auto q = state.queues[i];
      auto& l = stats.links[i];
      l.max_q = std::max(l.max_q, q);
      if (t <= burn_in) continue;
      l.queue_sum += static_cast<double>(q);
      for (std::size_t b = 0; b < cfg.thresholds.size(); ++b)
        if (q > cfg.thresholds[b]) ++l.overflow_counts[b];
    }
  }
  stats.measured_slots = cfg.slots - burn_in;
  const double slots = static_cast<double>(cfg.slots);
  for (int i = 0; i < n; ++i) {
    auto& l = stats.links[i];
    l.arrivals = state.cum_arrivals[i];
    l.departures = state.cum_departures[i];
    l.final_queue = state.queues[i];
    l.rate_in = static_cast<double>(l.arrivals) / slots;
    l.rate_out = static_cast<double>(l.departures) / slots;
    l.drift = static_cast<double>(l.final_queue) / slots;
    l.mean_q = stats.measured_slots > 0 ? l.queue_sum / static_cast<double>(stats.measured_slots) : 0.0;
  }
  return stats;
}

std::vector<RunStats> run_replications(const InterferenceGraph& g, const PrioritySpec& spec, const Traffic& traffic,
                                       const RunConfig& cfg, int count) {
  std::vector<std::future<RunStats>> jobs;
  for (int r = 0; r < count; ++r) {
    RunConfig c = cfg;
    c.seed = derive_seed(cfg.seed, stream_purpose::replication, static_cast<std::uint64_t>(r));
    jobs.push_back(std::async(std::launch::async, [&g, &spec, &traffic, c] { return run(g, spec, traffic, c); }));
  }
  std::vector<RunStats> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

RunStats merge(std::span<const RunStats> runs) {
  RunStats m;
  if (runs.empty()) return m;
  m.thresholds = runs.front().thresholds;
  const std::size_t n = runs.front().links.size();
  m.links.assign(n, LinkStats{});
  for (auto& l : m.links) l.overflow_counts.assign(m.thresholds.size(), 0);
  for (const auto& r : runs) {
    if (r.links.size() != n || r.thresholds != m.thresholds) throw InputError("cannot merge runs of different shape");
    m.slots += r.slots;
    m.measured_slots += r.measured_slots;
    for (std::size_t i = 0; i < n; ++i) {
      auto& l = m.links[i];
      const auto& x = r.links[i];
      l.arrivals += x.arrivals;
      l.departures += x.departures;
      l.final_queue += x.final_queue;
      l.queue_sum += x.queue_sum;
      l.max_q = std::max(l.max_q, x.max_q);
      for (std::size_t b = 0; b < m.thresholds.size(); ++b) l.overflow_counts[b] += x.overflow_counts[b];
    }
  }
  const double slots = static_cast<double>(m.slots);
  for (auto& l : m.links) {
    l.rate_in = static_cast<double>(l.arrivals) / slots;
    l.rate_out = static_cast<double>(l.departures) / slots;
    l.drift = static_cast<double>(l.final_queue) / slots;
    l.mean_q = m.measured_slots > 0 ? l.queue_sum / static_cast<double>(m.measured_slots) : 0.0;
  }
  return m;
}

DominantSystem build_dominant_system(const InterferenceGraph& g, int link, const Priority& p, const Traffic& traffic,
                                     DominantMode mode) {
  g.check_link(link);
  if (p.size() != g.size() || traffic.size() != g.size()) throw InputError("dominant system inputs disagree on link count");
  std::vector<int> competitors;
  for (int j : g.neighbors(link))
    if (mode == DominantMode::all_neighbors || p.higher(j, link)) competitors.push_back(j);
  std::sort(competitors.begin(), competitors.end(), [&](int a, int b) { return p.higher(a, b); });

  DominantSystem d;
  d.original = competitors;
  d.original.push_back(link);
  const int k = static_cast<int>(d.original.size());
  d.graph = InterferenceGraph::complete(k);
  d.tagged = k - 1;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  d.priority = Priority::from_order(order);
  for (int j : d.original) {
    d.traffic.models.push_back(traffic.models[j]);
    if (!traffic.phases.empty()) d.traffic.phases.push_back(traffic.phases[j]);
  }
  return d;
}

CoupledResult coupled_dominance_run(const InterferenceGraph& g, const Priority& p, const Traffic& traffic, int link,
                                    DominantMode mode, std::int64_t slots, std::uint64_t seed) {
  const auto dom = build_dominant_system(g, link, p, traffic, mode);
  const int n = g.size();
  const int k = dom.graph.size();
  Scheduler original(g, p, seed);
  Scheduler dominant(dom.graph, dom.priority, seed);
  TrafficSource source(traffic, seed);
  SimState s(n), s2(k);
  std::vector<int> arr(n), arr2(k);
  CoupledResult res;
  res.slots = slots;
  for (std::int64_t t = 1; t <= slots; ++t) {
    source.next(arr);
    for (int j = 0; j < k; ++j) arr2[j] = arr[dom.original[j]];
    original.step(s, arr);
    dominant.step(s2, arr2);
    const auto q = s.queues[link], q2 = s2.queues[dom.tagged];
    res.max_original = std::max(res.max_original, q);
    res.max_dominant = std::max(res.max_dominant, q2);
    if (q > q2) res.violations.push_back(t);
  }
  return res;
}

}  // namespace prisched
