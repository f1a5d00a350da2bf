#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "prisched/graph.hpp"
#include "prisched/priority.hpp"

namespace prisched {

struct DecompositionTerm {
  LinkSet set;  // a maximal independent set
  double weight = 0.0;
};

/// Convex combination of maximal sets covering (target_scale) * (a + epsilon).
struct Decomposition {
  std::vector<DecompositionTerm> terms;
  double epsilon = 0.0;
  double target_scale = 1.0;   // 1 for exact solves, 1 - tol for approximate ones
  double budget = 1.0;         // total weight before padding
  std::vector<double> coverage;   // sum_k weight_k * 1(i in set_k)
  std::vector<double> residuals;  // coverage - target_scale * (a + epsilon)
  std::int64_t oracle_calls = 0;

  /// Weight-k term favors its set: members first by index, then the rest by index.
  PriorityDistribution induced_distribution(int n) const;
};

struct DecompositionFailure {
  enum class Kind { infeasible, nonconvergence };
  Kind kind = Kind::infeasible;
  std::string message;
  /// Infeasible: link weights y >= 0 with every maximal set weighing at most 1
  /// and y . (a + epsilon) > 1. Nonconvergence: best coverage reached.
  std::vector<double> evidence;
};

using DecompositionResult = std::variant<Decomposition, DecompositionFailure>;

/// Exact covering LP over the enumerated maximal sets, padded to total weight
/// one and reduced to at most n + 1 terms.
DecompositionResult decompose_exact(const InterferenceGraph& g, std::span<const double> a, double epsilon,
                                    const Limits& limits = {});

/// Maps link weights to a maximal independent set of (approximately) largest weight.
using SetOracle = std::function<LinkSet(std::span<const double>)>;

struct ApproxOptions {
  double tol = 0.05;
  /// Iterations per budget probe; 0 uses the width bound 4 (t / b_min) ln n / tol^2.
  std::int64_t max_iterations_per_budget = 0;
};

/// Multiplicative-weights covering with a binary search over the budget.
/// Coverage target is (1 - tol)(a + epsilon). The default oracle is exact MWIS.
DecompositionResult decompose_approx(const InterferenceGraph& g, std::span<const double> a, double epsilon,
                                     const ApproxOptions& opts = {}, SetOracle oracle = {},
                                     const Limits& limits = {});

/// Half the largest uniform slack of a inside the max region, raised to 1e-4
/// when that still stays inside. nullopt when a is not strictly inside.
std::optional<double> default_epsilon(const InterferenceGraph& g, std::span<const double> a,
                                      const Limits& limits = {});

/// Carathéodory reduction: same combination sum_k w_k * indicator(set_k), same
/// total weight, at most n + 1 terms.
std::vector<DecompositionTerm> reduce_support(std::vector<DecompositionTerm> terms, int n);

}  // namespace prisched
