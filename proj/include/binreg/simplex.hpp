#pragma once

#include <cstddef>

#include "binreg/dataset.hpp"

namespace binreg {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  std::size_t max_pivots = 50000;
};

/// maximize c^T x  subject to  A x = b, x >= 0.
///
/// Dense two-phase tableau simplex with Bland's smallest-index rule for both
/// the entering and the leaving variable, so it terminates on degenerate
/// problems. Throws LPNumericalFailure when the pivot cap is hit or phase one
/// ends with an artificial it cannot remove.
LpResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c,
                             const SimplexOptions& options = {});

}  // namespace binreg
