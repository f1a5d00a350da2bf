#pragma once

#include <vector>

namespace prisched {

enum class RowSense { less_equal, greater_equal, equal };

struct LpRow {
  std::vector<double> coeffs;
  RowSense sense = RowSense::less_equal;
  double rhs = 0.0;
};

/// maximize objective . x subject to rows, x >= 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
  /// Shadow price of each row at the optimum (>= 0 for binding <= rows, <= 0 for >= rows).
  std::vector<double> duals;
};

/// Dense two-phase tableau simplex. Dantzig pricing with a switch to Bland's
/// rule after a run of degenerate pivots, so it terminates on degenerate
/// covering LPs. Meant for a few dozen rows and a few thousand columns.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace prisched
