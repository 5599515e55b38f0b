#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "binreg/dataset.hpp"
#include "binreg/simplex.hpp"

namespace binreg {

enum class OverlapVerdict { Overlap, Separated, DegenerateAllEqual };
enum class OverlapMethod { ScalarIntervals, ConeLP };

/// Extremes of x within each label group (scalar predictor only).
struct IntervalBounds {
  double l0, u0, l1, u1;
};

/// Which tie configuration a scalar dataset hits when the group ranges touch
/// in a single point instead of overlapping.
enum class TiePattern {
  None,
  Group0PointAtLowerEndOfGroup1,  // L0 = U0 = L1 < U1
  Group0PointAtUpperEndOfGroup1,  // L1 < U1 = L0 = U0
  Group1PointAtLowerEndOfGroup0,  // L1 = U1 = L0 < U0
  Group1PointAtUpperEndOfGroup0,  // L0 < U0 = L1 = U1
};

/// Certificate from the cone LP. When feasible, k (y = 1 rows) and m (y = 0
/// rows) satisfy sum k_i x~_i = sum m_j x~_j with every coefficient >= margin.
struct ConeCertificate {
  bool feasible = false;
  double margin = 0.0;
  Vector k;
  Vector m;
  double residual = 0.0;  // max-abs equality residual on the LP's scaled columns
  std::size_t pivots = 0;
};

struct OverlapReport {
  OverlapVerdict verdict = OverlapVerdict::Separated;
  OverlapMethod method = OverlapMethod::ScalarIntervals;
  std::optional<IntervalBounds> bounds;
  std::optional<ConeCertificate> cone;
  /// Sign of the slope's divergence for a separated scalar predictor.
  std::optional<int> direction_hint;
  TiePattern tie = TiePattern::None;
};

inline constexpr double kConeMarginMin = 1e-9;

/// Interval rule for d = 1: Overlap iff L0 < U1 and L1 < U0. Ranges that only
/// touch (including the single-point tie patterns) are quasi-separated and
/// reported as Separated with the slope's direction; all x equal is
/// DegenerateAllEqual. Float ties are exact. Throws DimensionError if d != 1.
OverlapReport scalar_overlap(const Dataset& ds);

/// Open-cone intersection test. Solves
///   max t  s.t.  sum_{y=1} k_i x~_i - sum_{y=0} m_j x~_j = 0,
///                k_i >= t, m_j >= t, sum k + sum m = 1
/// with predictor columns centred and scaled by their max-abs value (a
/// nonsingular change of coordinates that leaves the cones' intersection
/// unchanged). Overlap iff the optimum exceeds t_min; infeasible or t <= t_min
/// is Separated. Identical rows give DegenerateAllEqual.
/// Throws LPNumericalFailure on solver trouble.
OverlapReport cone_overlap(const DesignMatrix& dm, std::span<const int> y,
                           double t_min = kConeMarginMin);

/// Convenience: builds the design and runs the cone test.
OverlapReport cone_overlap(const Dataset& ds, double t_min = kConeMarginMin);

std::string_view to_string(OverlapVerdict v);
std::string_view to_string(OverlapMethod m);
std::string_view to_string(TiePattern p);

}  // namespace binreg
