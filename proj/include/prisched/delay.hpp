#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prisched/engine.hpp"
#include "prisched/graph.hpp"
#include "prisched/priority.hpp"
#include "prisched/traffic.hpp"

namespace prisched {

/// Exponents at or beyond this are reported as infinite.
inline constexpr double kExponentCap = 64.0;

/// min over u in [0, theta] of sum_j log_mgf_j(u) - u.
double inner_inf(std::span<const ArrivalModel> competitors, double theta);

enum class ExponentStatus { finite, infinite, unstable };

struct ExponentResult {
  ExponentStatus status = ExponentStatus::finite;
  double value = 0.0;     // kInfinity when infinite, 0 when unstable
  double residual = 0.0;  // |F(value)| for finite roots
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  LinkSet competing_set;  // filled by graph-level callers

  /// theta strictly below the exponent; a zero target always passes.
  bool admits(double theta) const;
};

/// Largest root of log_mgf_own(theta) + inner_inf(competitors, theta) = 0.
ExponentResult delay_exponent(const ArrivalModel& own, std::span<const ArrivalModel> competitors);

/// Same equation with the competitors taken from the graph: neighbors j of
/// `link` for which `competes[j]` is set.
ExponentResult delay_exponent_in(const InterferenceGraph& g, const Traffic& traffic, int link,
                                 const std::vector<char>& competes);

/// Exponent with the higher-priority neighbors of `link` as competitors.
ExponentResult fixed_priority_exponent(const InterferenceGraph& g, const Traffic& traffic, int link, const Priority& p);

/// Exponent with every neighbor as a competitor (the worst case over priorities).
ExponentResult worst_case_exponent(const InterferenceGraph& g, const Traffic& traffic, int link);

/// Exponent of the summed queue of the link and its competitors served at one
/// packet per slot. A looser bound, kept for comparison.
ExponentResult sum_queue_exponent(const ArrivalModel& own, std::span<const ArrivalModel> competitors);

/// theta_i below the fixed-priority exponent at every link with theta_i > 0.
bool delay_region_check(const InterferenceGraph& g, const Traffic& traffic, std::span<const double> theta,
                        const Priority& p);

enum class DelayOrdering {
  as_printed,          // any qualifying link, lowest index first
  zero_targets_first,  // links with zero target take the lowest ranks first
};

struct DelayPriorityResult {
  bool feasible = false;
  Priority priority;  // valid when feasible
  DelayOrdering ordering_used = DelayOrdering::as_printed;
  /// When infeasible: the links left when no remaining link qualified.
  std::vector<int> stuck;
};

/// Lowest-rank-first assignment: at each step pick a remaining link whose
/// target is below its exponent against remaining neighbors with positive
/// targets, then zero its target. The result is verified with
/// delay_region_check; when the printed order fails verification the
/// zero-targets-first order is tried.
DelayPriorityResult delay_priority(const InterferenceGraph& g, const Traffic& traffic, std::span<const double> theta,
                                   DelayOrdering ordering = DelayOrdering::as_printed);

/// theta = -log(eps) / B, the buffer/probability to exponent conversion.
double qos_to_exponent(double buffer, double eps);

struct OverflowPoint {
  std::int64_t threshold = 0;
  std::int64_t count = 0;    // post-burn-in slots with Q > B, pooled
  double frequency = 0.0;
  double neg_log = kInfinity;
  bool low_confidence = false;  // fewer than 50 events
  bool used = false;            // entered the slope fit
};

struct OverflowEstimate {
  std::vector<OverflowPoint> points;
  double slope = kInfinity;  // least-squares slope of -log(frequency) vs B
  bool infinite = false;     // no exceedances at any threshold
  std::int64_t measured_slots = 0;
};

/// Pooled exceedance frequencies over `reps` replications sharing `total_slots`.
OverflowEstimate estimate_overflow(const InterferenceGraph& g, const PrioritySpec& spec, const Traffic& traffic,
                                   int link, std::span<const std::int64_t> thresholds, std::int64_t total_slots,
                                   int reps, std::uint64_t seed);

/// Slope fit from already-measured counts.
OverflowEstimate fit_overflow(std::span<const std::int64_t> thresholds, std::span<const std::int64_t> counts,
                              std::int64_t measured_slots);

}  // namespace prisched
