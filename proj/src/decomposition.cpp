#include "prisched/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "prisched/lp.hpp"
#include "prisched/traffic.hpp"

namespace prisched {

namespace {

constexpr double kWeightFloor = 1e-15;

void check_inputs(const InterferenceGraph& g, std::span<const double> a, double epsilon) {
  if (a.size() != static_cast<std::size_t>(g.size())) throw InputError("rate vector length differs from link count");
  for (double v : a)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("rates must be finite and nonnegative");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be finite and nonnegative");
}

// One vector z != 0 with A z = 0 for a (rows x cols) matrix with cols > rows.
std::vector<double> null_vector(std::vector<std::vector<double>> A, int cols) {
  const int rows = static_cast<int>(A.size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::abs(A[i][c]) > std::abs(A[best][c])) best = i;
    if (std::abs(A[best][c]) < 1e-12) continue;
    std::swap(A[r], A[best]);
    const double inv = 1.0 / A[r][c];
    for (int j = 0; j < cols; ++j) A[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0.0) continue;
      const double f = A[i][c];
      for (int j = 0; j < cols; ++j) A[i][j] -= f * A[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  int free_col = 0;
  while (is_pivot[free_col]) ++free_col;
  std::vector<double> z(cols, 0.0);
  z[free_col] = 1.0;
  for (std::size_t k = 0; k < pivot_col.size(); ++k) z[pivot_col[k]] = -A[k][free_col];
  return z;
}

std::vector<double> coverage_of(const std::vector<DecompositionTerm>& terms, int n) {
  std::vector<double> c(n, 0.0);
  for (const auto& t : terms)
    for (int i : t.set) c[i] += t.weight;
  return c;
}

Decomposition finish(const InterferenceGraph& g, std::span<const double> a, double epsilon, double scale,
                     std::vector<DecompositionTerm> terms, double budget) {
  const int n = g.size();
  if (budget < 1.0) {
    const auto pad = first_maximal_set(g);
    auto it = std::find_if(terms.begin(), terms.end(), [&](const DecompositionTerm& t) { return t.set == pad; });
    if (it == terms.end())
      terms.push_back({pad, 1.0 - budget});
    else
      it->weight += 1.0 - budget;
  }
  terms = reduce_support(std::move(terms), n);
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.set < y.set; });

  Decomposition d;
  d.terms = std::move(terms);
  d.epsilon = epsilon;
  d.target_scale = scale;
  d.budget = budget;
  d.coverage = coverage_of(d.terms, n);
  d.residuals.resize(n);
  for (int i = 0; i < n; ++i) d.residuals[i] = d.coverage[i] - scale * (a[i] + epsilon);
  return d;
}

}  // namespace

PriorityDistribution Decomposition::induced_distribution(int n) const {
  PriorityDistribution dist;
  for (const auto& t : terms) {
    dist.priorities.push_back(Priority::favoring(n, t.set));
    dist.probabilities.push_back(t.weight);
  }
  const double total = std::accumulate(dist.probabilities.begin(), dist.probabilities.end(), 0.0);
  for (double& p : dist.probabilities) p /= total;
  return dist;
}

std::vector<DecompositionTerm> reduce_support(std::vector<DecompositionTerm> terms, int n) {
  std::erase_if(terms, [](const DecompositionTerm& t) { return t.weight <= kWeightFloor; });
  while (static_cast<int>(terms.size()) > n + 1) {
    const int cols = n + 2;
    std::vector<std::vector<double>> A(n + 1, std::vector<double>(cols, 0.0));
    for (int k = 0; k < cols; ++k) {
      for (int i : terms[k].set) A[i][k] = 1.0;
      A[n][k] = 1.0;
    }
    auto z = null_vector(std::move(A), cols);
    // The all-ones row forces mixed signs; scale so some entry is positive.
    if (std::none_of(z.begin(), z.end(), [](double v) { return v > 1e-12; }))
      for (double& v : z) v = -v;
    double step = kInfinity;
    int drop = -1;
    for (int k = 0; k < cols; ++k) {
      if (z[k] <= 1e-12) continue;
      const double s = terms[k].weight / z[k];
      if (s < step) step = s, drop = k;
    }
    for (int k = 0; k < cols; ++k) terms[k].weight -= step * z[k];
    terms[drop].weight = 0.0;
    std::erase_if(terms, [](const DecompositionTerm& t) { return t.weight <= kWeightFloor; });
  }
  return terms;
}

DecompositionResult decompose_exact(const InterferenceGraph& g, std::span<const double> a, double epsilon,
                                    const Limits& limits) {
  check_inputs(g, a, epsilon);
  const int n = g.size();
  const auto family = enumerate_maximal_sets(g, limits);
  const int k = static_cast<int>(family.size());

  auto solve = [&](double margin) {
    LinearProgram lp;
    lp.objective.assign(k, -1.0);
    for (int i = 0; i < n; ++i) {
      LpRow row;
      row.coeffs.assign(k, 0.0);
      for (int s = 0; s < k; ++s)
        if (std::binary_search(family[s].begin(), family[s].end(), i)) row.coeffs[s] = 1.0;
      row.sense = RowSense::greater_equal;
      row.rhs = a[i] + epsilon + margin;
      lp.rows.push_back(std::move(row));
    }
    return solve_lp(lp);
  };

  auto sol = solve(1e-9);
  if (sol.status != LpStatus::optimal || -sol.value > 1.0 + 1e-12) sol = solve(0.0);
  if (sol.status != LpStatus::optimal) throw InputError("covering LP did not reach an optimum");
  const double budget = -sol.value;
  if (budget > 1.0 + 1e-12) {
    DecompositionFailure f;
    f.kind = DecompositionFailure::Kind::infeasible;
    f.evidence.resize(n);
    for (int i = 0; i < n; ++i) f.evidence[i] = std::max(0.0, -sol.duals[i]);
    f.message = "a + epsilon*e needs total weight " + std::to_string(budget) +
                " > 1; link weights in the evidence give every maximal set weight <= 1 but the target weight > 1";
    return f;
  }
  std::vector<DecompositionTerm> terms;
  for (int s = 0; s < k; ++s)
    if (sol.x[s] > kWeightFloor) terms.push_back({family[s], sol.x[s]});
  return finish(g, a, epsilon, 1.0, std::move(terms), std::min(budget, 1.0));
}

DecompositionResult decompose_approx(const InterferenceGraph& g, std::span<const double> a, double epsilon,
                                     const ApproxOptions& opts, SetOracle oracle, const Limits& limits) {
  check_inputs(g, a, epsilon);
  if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw InputError("tol must lie in (0, 1)");
  const int n = g.size();
  if (n == 0) return finish(g, a, epsilon, 1.0 - opts.tol, {}, 1.0);
  if (!oracle) {
    auto family = std::make_shared<std::vector<LinkSet>>(enumerate_maximal_sets(g, limits));
    oracle = [family](std::span<const double> w) { return max_weight_among(*family, w); };
  }
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = a[i] + epsilon;
  const double b_min = *std::min_element(b.begin(), b.end());
  if (!(b_min > 0.0)) throw InputError("approximate decomposition needs a_i + epsilon > 0 for every link");
  const double goal = 1.0 - opts.tol;
  // Normalized gain of a set for link i: b_min / b_i if covered; in [0, 1].
  const double eta = 0.5 * opts.tol;
  auto iteration_cap = [&](double t) -> std::int64_t {
    if (opts.max_iterations_per_budget > 0) return opts.max_iterations_per_budget;
    const double width = t / b_min;
    return static_cast<std::int64_t>(std::ceil(4.0 * width * std::log(std::max(n, 2)) / (opts.tol * opts.tol))) + 1;
  };

  std::int64_t calls = 0;
  std::vector<double> best_coverage(n, 0.0);

  struct Probe {
    bool feasible = false;
    std::vector<DecompositionTerm> terms;
  };
  auto probe = [&](double t) {
    std::vector<double> log_w(n, 0.0), lambda(n), w(n), gain_sum(n, 0.0);
    std::vector<std::pair<LinkSet, std::int64_t>> picks;
    Probe out;
    const std::int64_t cap = iteration_cap(t);
    for (std::int64_t it = 1; it <= cap; ++it) {
      const double top = *std::max_element(log_w.begin(), log_w.end());
      double z = 0.0;
      for (int i = 0; i < n; ++i) z += lambda[i] = std::exp(log_w[i] - top);
      for (int i = 0; i < n; ++i) w[i] = t * lambda[i] / z / b[i];
      LinkSet m = oracle(w);
      ++calls;
      if (!is_independent(g, m)) throw InputError("oracle returned a set that is not independent");
      std::sort(m.begin(), m.end());
      auto found = std::find_if(picks.begin(), picks.end(), [&](const auto& p) { return p.first == m; });
      if (found == picks.end())
        picks.emplace_back(m, 1);
      else
        ++found->second;
      for (int i : m) {
        gain_sum[i] += b_min / b[i];
        log_w[i] -= eta * b_min / b[i];
      }
      // t * min_i (average coverage of i) / b_i
      double worst = kInfinity;
      for (int i = 0; i < n; ++i) worst = std::min(worst, t * gain_sum[i] / static_cast<double>(it) / b_min);
      if (t == 1.0)
        for (int i = 0; i < n; ++i) best_coverage[i] = std::max(best_coverage[i], gain_sum[i] / static_cast<double>(it) * b[i] / b_min);
      if (worst >= goal) {
        out.feasible = true;
        for (const auto& [set, count] : picks)
          out.terms.push_back({set, t * static_cast<double>(count) / static_cast<double>(it)});
        return out;
      }
    }
    return out;
  };

  Probe full = probe(1.0);
  if (!full.feasible) {
    DecompositionFailure f;
    f.kind = DecompositionFailure::Kind::nonconvergence;
    f.evidence = best_coverage;
    f.message = "multiplicative weights did not reach (1 - tol) coverage at budget 1 within the iteration cap";
    return f;
  }
  double lo = 0.0, hi = 1.0;
  Probe best = std::move(full);
  while (hi - lo > opts.tol * hi / 4.0) {
    const double mid = 0.5 * (lo + hi);
    Probe p = probe(mid);
    if (p.feasible) {
      hi = mid;
      best = std::move(p);
    } else {
      lo = mid;
    }
  }
  double budget = 0.0;
  for (const auto& t : best.terms) budget += t.weight;
  auto d = finish(g, a, epsilon, goal, std::move(best.terms), std::min(budget, 1.0));
  d.oracle_calls = calls;
  return d;
}

std::optional<double> default_epsilon(const InterferenceGraph& g, std::span<const double> a, const Limits& limits) {
  const double slack = max_uniform_slack(g, a, limits);
  if (!(slack > 1e-12)) return std::nullopt;
  if (!std::isfinite(slack)) return 1e-4;
  double eps = slack / 2.0;
  if (eps < 1e-4 && 1e-4 < slack) eps = 1e-4;
  return eps;
}

}  // namespace prisched
