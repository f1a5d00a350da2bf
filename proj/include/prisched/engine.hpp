#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "prisched/graph.hpp"
#include "prisched/priority.hpp"
#include "prisched/rng.hpp"
#include "prisched/traffic.hpp"

namespace prisched {

/// Queue state after `slot` completed slots.
struct SimState {
  std::int64_t slot = 0;
  std::vector<std::int64_t> queues;
  std::vector<std::int64_t> cum_arrivals;
  std::vector<std::int64_t> cum_departures;
  std::vector<std::int64_t> initial;

  SimState() = default;
  explicit SimState(int n) : queues(n, 0), cum_arrivals(n, 0), cum_departures(n, 0), initial(n, 0) {}
  static SimState with_queues(std::vector<std::int64_t> q);

  int size() const { return static_cast<int>(queues.size()); }
};

/// Greedy pass in priority order: a link is taken iff its queue is nonempty and
/// no neighbor was already taken. Result is sorted.
LinkSet prioritized_maximal_schedule(const InterferenceGraph& g, std::span<const std::int64_t> queues,
                                     const Priority& p);

/// Resolves the slot's priority vector from a PrioritySpec and applies slots.
class Scheduler {
 public:
  Scheduler(const InterferenceGraph& g, PrioritySpec spec, std::uint64_t seed, const Limits& limits = {});

  /// Priority used for a slot that starts with `queues`. Consumes randomness
  /// for distribution specs.
  Priority resolve(std::span<const std::int64_t> queues);

  /// One slot: schedule on start-of-slot queues, serve one packet per scheduled
  /// link, then append `arrivals`. Returns the schedule.
  LinkSet step(SimState& state, std::span<const int> arrivals);
  LinkSet step(SimState& state, TrafficSource& source);

  const InterferenceGraph& graph() const { return g_; }

 private:
  InterferenceGraph g_;
  PrioritySpec spec_;
  Rng rng_;
  std::vector<double> cumulative_;
  std::vector<LinkSet> family_;
  std::vector<int> fixed_order_;
  std::vector<int> arrivals_buf_;
};

struct RunConfig {
  std::int64_t slots = 1000;
  std::uint64_t seed = 1;
  std::vector<std::int64_t> thresholds;
  double burn_in_fraction = 0.1;
  Limits limits;
};

struct LinkStats {
  double rate_in = 0.0;
  double rate_out = 0.0;
  double mean_q = 0.0;  // over post-burn-in slots
  std::int64_t max_q = 0;
  double drift = 0.0;  // Q(n) / n
  std::vector<std::int64_t> overflow_counts;  // slots after burn-in with Q > B
  std::int64_t arrivals = 0;
  std::int64_t departures = 0;
  std::int64_t final_queue = 0;
  double queue_sum = 0.0;
};

struct RunStats {
  std::int64_t slots = 0;
  std::int64_t measured_slots = 0;  // slots after burn-in
  std::vector<std::int64_t> thresholds;
  std::vector<LinkStats> links;

  double overflow_frequency(int link, std::size_t threshold_index) const;
};

/// Per-slot observer: state after the slot and the schedule used.
using TraceFn = std::function<void(const SimState&, const LinkSet&)>;

/// Runs `cfg.slots` slots from empty queues. Arrival streams derive from
/// cfg.seed under the arrival purposes, priority sampling from the priority purpose.
RunStats run(const InterferenceGraph& g, const PrioritySpec& spec, const Traffic& traffic, const RunConfig& cfg,
             const TraceFn& trace = {});

/// Independent replications (seeds derived from cfg.seed), run concurrently.
std::vector<RunStats> run_replications(const InterferenceGraph& g, const PrioritySpec& spec, const Traffic& traffic,
                                       const RunConfig& cfg, int count);

/// Pools replications: counts and sums add, rates and means are recomputed.
RunStats merge(std::span<const RunStats> runs);

enum class DominantMode { higher_priority, all_neighbors };

struct DominantSystem {
  InterferenceGraph graph;
  Priority priority;
  Traffic traffic;
  std::vector<int> original;  // original[k] = original index of local link k
  int tagged = 0;             // local index of the tagged link
};

/// Clique over the tagged link and its competitors, tagged link lowest, the
/// others keeping their relative order. Arrival models carry over unchanged.
DominantSystem build_dominant_system(const InterferenceGraph& g, int link, const Priority& p, const Traffic& traffic,
                                     DominantMode mode = DominantMode::higher_priority);

/// Runs the original system and the dominant system on one shared arrival path.
/// Returns the slots where the tagged queue in the original exceeded the
/// dominant one (empty when dominance held throughout).
struct CoupledResult {
  std::vector<std::int64_t> violations;
  std::int64_t slots = 0;
  std::int64_t max_original = 0;
  std::int64_t max_dominant = 0;
};
CoupledResult coupled_dominance_run(const InterferenceGraph& g, const Priority& p, const Traffic& traffic, int link,
                                    DominantMode mode, std::int64_t slots, std::uint64_t seed);

}  // namespace prisched
