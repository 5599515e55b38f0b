#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace binreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One input observation: predictor vector and a 0/1 label.
struct Row {
  std::vector<double> x;
  int y = 0;
};

/// Validated binary-response data. Immutable once built; every label is 0 or
/// 1, both groups are nonempty and every predictor is finite.
class Dataset {
 public:
  /// Validates and takes ownership. Throws NonBinaryLabel, EmptyGroup,
  /// DimensionMismatch or NonFiniteValue.
  Dataset(Matrix x, std::vector<int> y);

  const Matrix& x() const { return x_; }
  const std::vector<int>& y() const { return y_; }
  std::size_t n() const { return y_.size(); }
  std::size_t d() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t n0() const { return n0_; }
  std::size_t n1() const { return n1_; }

  /// Rows reordered by `order` (a permutation of 0..n-1).
  Dataset permuted(std::span<const std::size_t> order) const;

 private:
  Matrix x_;
  std::vector<int> y_;
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
};

struct GroupStats {
  Vector xbar0;
  Vector xbar1;
  Vector delta;  // xbar1 - xbar0
};

/// The n x (d+1) matrix with rows (1, x_i^T) and its numerical rank verdict.
struct DesignMatrix {
  Matrix xt;
  bool rank_ok = false;
  double rank_tolerance = 1e-10;
  std::size_t rank = 0;
};

inline constexpr double kDefaultRankTolerance = 1e-10;

Dataset build_dataset(std::span<const Row> rows);

/// Group means using Kahan-compensated sums.
GroupStats group_stats(const Dataset& ds);

/// Column means of x over all rows, compensated.
Vector overall_mean(const Dataset& ds);

/// Prepends the intercept column and decides full column rank with an SVD:
/// singular values below rank_tolerance * s_max count as zero.
DesignMatrix extended_design(const Dataset& ds,
                             double rank_tolerance = kDefaultRankTolerance);

/// Per-column centering and scaling used by the fitter and the overlap LP:
/// z = (x - center) / scale, scale = max |x - center| (1 for constant columns).
struct Standardization {
  Vector center;
  Vector scale;

  static Standardization from(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

}  // namespace binreg
