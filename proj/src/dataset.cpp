#include "binreg/dataset.hpp"

#include <cmath>
#include <string>

#include "binreg/error.hpp"
#include "binreg/numeric.hpp"

namespace binreg {

Dataset::Dataset(Matrix x, std::vector<int> y) : x_(std::move(x)), y_(std::move(y)) {
  if (y_.empty()) throw DimensionMismatch("dataset has no rows");
  if (static_cast<std::size_t>(x_.rows()) != y_.size()) {
    throw DimensionMismatch("predictor rows (" + std::to_string(x_.rows()) +
                            ") differ from label count (" + std::to_string(y_.size()) + ")");
  }
  if (x_.cols() < 1) throw DimensionMismatch("at least one predictor column is required");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (y_[i] == 0) {
      ++n0_;
    } else if (y_[i] == 1) {
      ++n1_;
    } else {
      throw NonBinaryLabel("label at row " + std::to_string(i) + " is " + std::to_string(y_[i]) +
                           ", expected 0 or 1");
    }
    for (Eigen::Index j = 0; j < x_.cols(); ++j) {
      if (!std::isfinite(x_(static_cast<Eigen::Index>(i), j))) {
        throw NonFiniteValue("non-finite predictor at row " + std::to_string(i) + ", column " +
                             std::to_string(j));
      }
    }
  }
  if (n0_ == 0 || n1_ == 0) {
    throw EmptyGroup("both label groups must be nonempty (n0=" + std::to_string(n0_) +
                     ", n1=" + std::to_string(n1_) + ")");
  }
}

Dataset Dataset::permuted(std::span<const std::size_t> order) const {
  if (order.size() != n()) throw DimensionMismatch("permutation length differs from n");
  std::vector<bool> seen(n(), false);
  for (std::size_t k : order) {
    if (k >= n() || seen[k]) throw PreconditionError("order is not a permutation of the rows");
    seen[k] = true;
  }
  Matrix x(x_.rows(), x_.cols());
  std::vector<int> y(n());
  for (std::size_t i = 0; i < order.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = x_.row(static_cast<Eigen::Index>(order[i]));
    y[i] = y_.at(order[i]);
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset build_dataset(std::span<const Row> rows) {
  if (rows.empty()) throw DimensionMismatch("no rows given");
  const std::size_t d = rows.front().x.size();
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].x.size() != d) {
      throw DimensionMismatch("row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].x.size()) + " predictors, expected " +
                              std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].x[j];
    }
    y.push_back(rows[i].y);
  }
  return Dataset(std::move(x), std::move(y));
}

GroupStats group_stats(const Dataset& ds) {
  const auto d = static_cast<Eigen::Index>(ds.d());
  GroupStats gs{Vector(d), Vector(d), Vector(d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    CompensatedSum s0, s1;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const double v = ds.x()(static_cast<Eigen::Index>(i), j);
      (ds.y()[i] == 1 ? s1 : s0).add(v);
    }
    gs.xbar0(j) = s0.value() / static_cast<double>(ds.n0());
    gs.xbar1(j) = s1.value() / static_cast<double>(ds.n1());
  }
  gs.delta = gs.xbar1 - gs.xbar0;
  return gs;
}

Vector overall_mean(const Dataset& ds) {
  Vector m(static_cast<Eigen::Index>(ds.d()));
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    CompensatedSum s;
    for (Eigen::Index i = 0; i < ds.x().rows(); ++i) s.add(ds.x()(i, j));
    m(j) = s.value() / static_cast<double>(ds.n());
  }
  return m;
}

DesignMatrix extended_design(const Dataset& ds, double rank_tolerance) {
  const auto n = static_cast<Eigen::Index>(ds.n());
  const auto d = static_cast<Eigen::Index>(ds.d());
  DesignMatrix dm;
  dm.rank_tolerance = rank_tolerance;
  dm.xt.resize(n, d + 1);
  dm.xt.col(0).setOnes();
  dm.xt.rightCols(d) = ds.x();

  // Rank is decided on column-equilibrated data so that units do not matter;
  // column scaling is nonsingular and leaves the rank unchanged.
  Matrix scaled = dm.xt;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double m = scaled.col(j).cwiseAbs().maxCoeff();
    if (m > 0) scaled.col(j) /= m;
  }
  Eigen::JacobiSVD<Matrix> svd(scaled);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > rank_tolerance * smax) ++rank;
  }
  dm.rank = rank;
  dm.rank_ok = n >= d + 1 && rank == static_cast<std::size_t>(d + 1);
  return dm;
}

Standardization Standardization::from(const Matrix& x) {
  Standardization s{Vector(x.cols()), Vector(x.cols())};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    CompensatedSum sum;
    for (Eigen::Index i = 0; i < x.rows(); ++i) sum.add(x(i, j));
    const double c = sum.value() / static_cast<double>(x.rows());
    const double m = (x.col(j).array() - c).abs().maxCoeff();
    s.center(j) = c;
    s.scale(j) = m > 0 ? m : 1.0;
  }
  return s;
}

Matrix Standardization::apply(const Matrix& x) const {
  Matrix z = x;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    z.col(j) = (z.col(j).array() - center(j)) / scale(j);
  }
  return z;
}

}  // namespace binreg
