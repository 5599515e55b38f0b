#include "binreg/overlap.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "binreg/error.hpp"

namespace binreg {
namespace {

TiePattern classify_tie(const IntervalBounds& b) {
  if (b.l0 == b.u0 && b.u0 == b.l1 && b.l1 < b.u1) return TiePattern::Group0PointAtLowerEndOfGroup1;
  if (b.l1 < b.u1 && b.u1 == b.l0 && b.l0 == b.u0) return TiePattern::Group0PointAtUpperEndOfGroup1;
  if (b.l1 == b.u1 && b.u1 == b.l0 && b.l0 < b.u0) return TiePattern::Group1PointAtLowerEndOfGroup0;
  if (b.l0 < b.u0 && b.u0 == b.l1 && b.l1 == b.u1) return TiePattern::Group1PointAtUpperEndOfGroup0;
  return TiePattern::None;
}

bool all_rows_equal(const Matrix& x) {
  for (Eigen::Index i = 1; i < x.rows(); ++i) {
    if (x.row(i) != x.row(0)) return false;
  }
  return true;
}

int sign_of_mean_difference(const Matrix& x, std::span<const int> y) {
  double s0 = 0, s1 = 0;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = x(static_cast<Eigen::Index>(i), 0);
    if (y[i] == 1) {
      s1 += v;
      ++n1;
    } else {
      s0 += v;
      ++n0;
    }
  }
  const double diff = s1 / static_cast<double>(n1) - s0 / static_cast<double>(n0);
  return diff > 0 ? 1 : (diff < 0 ? -1 : 0);
}

}  // namespace

OverlapReport scalar_overlap(const Dataset& ds) {
  if (ds.d() != 1) throw DimensionError("scalar_overlap needs exactly one predictor");
  constexpr double inf = std::numeric_limits<double>::infinity();
  IntervalBounds b{inf, -inf, inf, -inf};
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double v = ds.x()(static_cast<Eigen::Index>(i), 0);
    if (ds.y()[i] == 1) {
      b.l1 = std::min(b.l1, v);
      b.u1 = std::max(b.u1, v);
    } else {
      b.l0 = std::min(b.l0, v);
      b.u0 = std::max(b.u0, v);
    }
  }
  OverlapReport r;
  r.method = OverlapMethod::ScalarIntervals;
  r.bounds = b;
  r.tie = classify_tie(b);
  if (b.l0 == b.u0 && b.u0 == b.l1 && b.l1 == b.u1) {
    r.verdict = OverlapVerdict::DegenerateAllEqual;
  } else if (b.l0 < b.u1 && b.l1 < b.u0) {
    r.verdict = OverlapVerdict::Overlap;
  } else {
    r.verdict = OverlapVerdict::Separated;
    r.direction_hint = b.u0 <= b.l1 ? 1 : -1;
  }
  return r;
}

OverlapReport cone_overlap(const DesignMatrix& dm, std::span<const int> y, double t_min) {
  const Eigen::Index n = dm.xt.rows();
  const Eigen::Index p = dm.xt.cols();
  if (static_cast<std::size_t>(n) != y.size()) throw DimensionMismatch("label count differs from design rows");
  std::vector<Eigen::Index> ones, zeros;
  for (Eigen::Index i = 0; i < n; ++i) (y[static_cast<std::size_t>(i)] == 1 ? ones : zeros).push_back(i);
  if (ones.empty() || zeros.empty()) throw EmptyGroup("cone_overlap needs both label groups");

  OverlapReport r;
  r.method = OverlapMethod::ConeLP;
  const Matrix predictors = dm.xt.rightCols(p - 1);
  if (all_rows_equal(predictors)) {
    r.verdict = OverlapVerdict::DegenerateAllEqual;
    return r;
  }

  Matrix scaled = dm.xt;
  scaled.rightCols(p - 1) = Standardization::from(predictors).apply(predictors);

  // Variables: k'_i (y=1), m'_j (y=0), t; with k = t + k', m = t + m'.
  const auto n1 = static_cast<Eigen::Index>(ones.size());
  const auto n0 = static_cast<Eigen::Index>(zeros.size());
  const Eigen::Index nv = n1 + n0 + 1;
  Matrix a = Matrix::Zero(p + 1, nv);
  Vector b = Vector::Zero(p + 1);
  Vector c = Vector::Zero(nv);
  Vector t_col = Vector::Zero(p);
  for (Eigen::Index i = 0; i < n1; ++i) {
    a.col(i).head(p) = scaled.row(ones[static_cast<std::size_t>(i)]).transpose();
    t_col += scaled.row(ones[static_cast<std::size_t>(i)]).transpose();
  }
  for (Eigen::Index j = 0; j < n0; ++j) {
    a.col(n1 + j).head(p) = -scaled.row(zeros[static_cast<std::size_t>(j)]).transpose();
    t_col -= scaled.row(zeros[static_cast<std::size_t>(j)]).transpose();
  }
  a.col(nv - 1).head(p) = t_col;
  a.row(p).head(n1 + n0).setOnes();
  a(p, nv - 1) = static_cast<double>(n);
  b(p) = 1.0;
  c(nv - 1) = 1.0;

  const LpResult lp = solve_standard_form(a, b, c);
  if (lp.status == LpStatus::Unbounded) throw LPNumericalFailure("cone LP reported unbounded");

  ConeCertificate cert;
  cert.pivots = lp.pivots;
  if (lp.status == LpStatus::Optimal) {
    cert.feasible = true;
    cert.margin = lp.x(nv - 1);
    cert.k = lp.x.head(n1).array() + cert.margin;
    cert.m = lp.x.segment(n1, n0).array() + cert.margin;
    Vector lhs = Vector::Zero(p);
    for (Eigen::Index i = 0; i < n1; ++i) lhs += cert.k(i) * scaled.row(ones[static_cast<std::size_t>(i)]).transpose();
    for (Eigen::Index j = 0; j < n0; ++j) lhs -= cert.m(j) * scaled.row(zeros[static_cast<std::size_t>(j)]).transpose();
    cert.residual = lhs.cwiseAbs().maxCoeff();
  }
  r.verdict = cert.feasible && cert.margin > t_min ? OverlapVerdict::Overlap : OverlapVerdict::Separated;
  if (r.verdict == OverlapVerdict::Separated && p == 2) {
    r.direction_hint = sign_of_mean_difference(predictors, y);
  }
  r.cone = std::move(cert);
  return r;
}

OverlapReport cone_overlap(const Dataset& ds, double t_min) {
  return cone_overlap(extended_design(ds), ds.y(), t_min);
}

std::string_view to_string(OverlapVerdict v) {
  switch (v) {
    case OverlapVerdict::Overlap: return "Overlap";
    case OverlapVerdict::Separated: return "Separated";
    case OverlapVerdict::DegenerateAllEqual: return "DegenerateAllEqual";
  }
  return "?";
}

std::string_view to_string(OverlapMethod m) {
  return m == OverlapMethod::ScalarIntervals ? "ScalarIntervals" : "ConeLP";
}

std::string_view to_string(TiePattern p) {
  switch (p) {
    case TiePattern::None: return "none";
    case TiePattern::Group0PointAtLowerEndOfGroup1: return "L0=U0=L1<U1";
    case TiePattern::Group0PointAtUpperEndOfGroup1: return "L1<U1=L0=U0";
    case TiePattern::Group1PointAtLowerEndOfGroup0: return "L1=U1=L0<U0";
    case TiePattern::Group1PointAtUpperEndOfGroup0: return "L0<U0=L1=U1";
  }
  return "?";
}

}  // namespace binreg
