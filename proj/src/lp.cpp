#include "prisched/lp.hpp"

#include <cmath>
#include <limits>

#include "prisched/errors.hpp"

namespace prisched {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), cols_(cols), data_(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double& cost(int c) { return at(m_, c); }

  void pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

  int rows() const { return m_; }
  int cols() const { return cols_; }

 private:
  int m_, cols_;
  std::vector<double> data_;
};

enum class PhaseResult { optimal, unbounded };

// Maximizes with the reduced-cost row already in place (row m holds z_j - c_j).
PhaseResult run_simplex(Tableau& t, std::vector<int>& basis, const std::vector<char>& may_enter) {
  int degenerate_run = 0;
  for (;;) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    int enter = -1;
    double best = -kPivotTol;
    for (int c = 0; c < t.cols(); ++c) {
      if (!may_enter[c]) continue;
      const double d = t.cost(c);
      if (d < -kPivotTol && (bland ? enter < 0 : d < best)) {
        enter = c;
        best = d;
      }
    }
    if (enter < 0) return PhaseResult::optimal;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t.rhs(r) / a;
      if (ratio < best_ratio - 1e-12 || (std::abs(ratio - best_ratio) <= 1e-12 && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) return PhaseResult::unbounded;
    degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.objective.size());
  const int m = static_cast<int>(lp.rows.size());
  for (const auto& row : lp.rows)
    if (static_cast<int>(row.coeffs.size()) != n) throw InputError("LP row width differs from objective width");

  // Normalize to nonnegative right-hand sides.
  std::vector<double> flip(m, 1.0);
  std::vector<RowSense> sense(m);
  for (int r = 0; r < m; ++r) {
    sense[r] = lp.rows[r].sense;
    if (lp.rows[r].rhs < 0.0) {
      flip[r] = -1.0;
      if (sense[r] == RowSense::less_equal)
        sense[r] = RowSense::greater_equal;
      else if (sense[r] == RowSense::greater_equal)
        sense[r] = RowSense::less_equal;
    }
  }

  // Column layout: structural | slack or surplus per inequality | artificial per >= or = row.
  std::vector<int> slack_col(m, -1), art_col(m, -1), identity_col(m, -1);
  int cols = n;
  for (int r = 0; r < m; ++r)
    if (sense[r] != RowSense::equal) slack_col[r] = cols++;
  for (int r = 0; r < m; ++r)
    if (sense[r] != RowSense::less_equal) art_col[r] = cols++;

  Tableau t(m, cols);
  std::vector<int> basis(m);
  std::vector<char> is_artificial(cols, 0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) t.at(r, c) = flip[r] * lp.rows[r].coeffs[c];
    t.rhs(r) = flip[r] * lp.rows[r].rhs;
    if (sense[r] == RowSense::less_equal) {
      t.at(r, slack_col[r]) = 1.0;
      identity_col[r] = slack_col[r];
    } else {
      if (slack_col[r] >= 0) t.at(r, slack_col[r]) = -1.0;
      t.at(r, art_col[r]) = 1.0;
      identity_col[r] = art_col[r];
      is_artificial[art_col[r]] = 1;
    }
    basis[r] = identity_col[r];
  }

  LpSolution sol;
  std::vector<char> may_enter(cols, 1);

  // Phase 1: maximize -sum(artificials).
  bool has_artificial = false;
  for (int r = 0; r < m; ++r) {
    if (art_col[r] < 0) continue;
    has_artificial = true;
    for (int c = 0; c <= cols; ++c) {
      if (c == art_col[r]) continue;
      (c == cols ? t.rhs(m) : t.cost(c)) -= (c == cols ? t.rhs(r) : t.at(r, c));
    }
  }
  if (has_artificial) {
    run_simplex(t, basis, may_enter);
    if (t.rhs(m) < -1e-9 * std::max(1.0, static_cast<double>(m))) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (!is_artificial[basis[r]]) continue;
      for (int c = 0; c < cols; ++c) {
        if (is_artificial[c] || std::abs(t.at(r, c)) <= kPivotTol) continue;
        t.pivot(r, c);
        basis[r] = c;
        break;
      }
    }
    for (int c = 0; c < cols; ++c)
      if (is_artificial[c]) may_enter[c] = 0;
  }

  // Phase 2: reduced costs for the real objective.
  for (int c = 0; c <= cols; ++c) t.cost(c) = 0.0;
  for (int c = 0; c < n; ++c) t.cost(c) = -lp.objective[c];
  for (int r = 0; r < m; ++r) {
    const int b = basis[r];
    const double cb = b < n ? lp.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (int c = 0; c <= cols; ++c) (c == cols ? t.rhs(m) : t.cost(c)) += cb * (c == cols ? t.rhs(r) : t.at(r, c));
  }
  if (run_simplex(t, basis, may_enter) == PhaseResult::unbounded) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  sol.status = LpStatus::optimal;
  sol.value = t.rhs(m);
  sol.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) sol.x[basis[r]] = std::max(0.0, t.rhs(r));
  sol.duals.resize(m);
  for (int r = 0; r < m; ++r) sol.duals[r] = flip[r] * t.cost(identity_col[r]);
  return sol;
}

}  // namespace prisched
