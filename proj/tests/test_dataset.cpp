#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "binreg/dataset.hpp"
#include "binreg/error.hpp"
#include "binreg/rng.hpp"
#include "support.hpp"

namespace binreg {
namespace {

using test::rows;
using test::scalar;

TEST(BuildDataset, CountsGroups) {
  const std::vector<Row> r{{{1.0}, 0}, {{2.0}, 1}};
  const Dataset ds = build_dataset(r);
  EXPECT_EQ(ds.n0(), 1u);
  EXPECT_EQ(ds.n1(), 1u);
  EXPECT_EQ(ds.d(), 1u);
  EXPECT_EQ(ds.n(), 2u);
}

TEST(BuildDataset, RejectsEmptyGroup) {
  const std::vector<Row> r{{{1.0}, 0}, {{2.0}, 0}};
  EXPECT_THROW(build_dataset(r), EmptyGroup);
}

TEST(BuildDataset, RejectsNonBinaryLabel) {
  const std::vector<Row> r{{{1.0}, 2}};
  EXPECT_THROW(build_dataset(r), NonBinaryLabel);
}

TEST(BuildDataset, RejectsRaggedRows) {
  const std::vector<Row> r{{{1.0}, 0}, {{2.0, 3.0}, 1}};
  EXPECT_THROW(build_dataset(r), DimensionMismatch);
}

TEST(BuildDataset, RejectsNonFinite) {
  const std::vector<Row> r{{{1.0}, 0}, {{std::nan("")}, 1}};
  EXPECT_THROW(build_dataset(r), NonFiniteValue);
  const std::vector<Row> r2{{{1.0}, 0}, {{HUGE_VAL}, 1}};
  EXPECT_THROW(build_dataset(r2), NonFiniteValue);
}

TEST(BuildDataset, RejectsEmptyInput) {
  EXPECT_THROW(build_dataset(std::span<const Row>{}), Error);
}

TEST(DatasetCtor, RejectsLabelLengthMismatch) {
  EXPECT_THROW(Dataset(Matrix::Zero(3, 1), std::vector<int>{0, 1}), DimensionMismatch);
}

TEST(GroupStats, ScalarMeans) {
  const GroupStats gs = group_stats(scalar({0, 1, 2, 3}, {0, 1, 0, 1}));
  EXPECT_DOUBLE_EQ(gs.xbar0(0), 1.0);
  EXPECT_DOUBLE_EQ(gs.xbar1(0), 2.0);
  EXPECT_DOUBLE_EQ(gs.delta(0), 1.0);
}

TEST(GroupStats, SymmetricAssignmentHasZeroDelta) {
  EXPECT_EQ(group_stats(scalar({0, 1, 2, 3}, {1, 0, 0, 1})).delta(0), 0.0);
}

TEST(GroupStats, VectorDelta) {
  const GroupStats gs = group_stats(rows({{1, 0}, {0, 1}}, {0, 1}));
  EXPECT_DOUBLE_EQ(gs.delta(0), -1.0);
  EXPECT_DOUBLE_EQ(gs.delta(1), 1.0);
}

TEST(GroupStats, WeightedMeansRecoverOverallMean) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const std::size_t n = 5 + rng.below(200);
    Matrix x(static_cast<Eigen::Index>(n), 3);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < 3; ++j) x(static_cast<Eigen::Index>(i), j) = 1e3 * rng.normal() + 1e6;
      y[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.below(2));
    }
    const Dataset ds(x, y);
    const GroupStats gs = group_stats(ds);
    const Vector lhs = static_cast<double>(ds.n0()) * gs.xbar0 + static_cast<double>(ds.n1()) * gs.xbar1;
    const Vector rhs = static_cast<double>(n) * overall_mean(ds);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(lhs(j), rhs(j), 1e-15 * std::abs(rhs(j)) * 8);
  }
}

TEST(GroupStats, CompensatedSumsKeepZeroDeltaExact) {
  // 1e8 + k * 0.1 for alternating labels, mirrored: the exact means agree.
  const std::size_t n = 4000;
  std::vector<double> x(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    x[i] = 1e8 + 0.1 * static_cast<double>(i);
    y[i] = static_cast<int>(i % 2);
    x[n - 1 - i] = x[i];
    y[n - 1 - i] = 1 - y[i];
  }
  EXPECT_LE(std::abs(group_stats(scalar(x, y)).delta(0)), 1e-8);
}

TEST(ExtendedDesign, DistinctValuesFullRank) {
  const DesignMatrix dm = extended_design(scalar({1, 2, 3}, {0, 1, 0}));
  EXPECT_EQ(dm.xt.rows(), 3);
  EXPECT_EQ(dm.xt.cols(), 2);
  EXPECT_TRUE(dm.rank_ok);
  EXPECT_EQ(dm.xt(1, 0), 1.0);
  EXPECT_EQ(dm.xt(1, 1), 2.0);
}

TEST(ExtendedDesign, ConstantColumnIsCollinearWithIntercept) {
  EXPECT_FALSE(extended_design(scalar({5, 5, 5}, {0, 1, 0})).rank_ok);
}

TEST(ExtendedDesign, ExactCollinearity) {
  EXPECT_FALSE(extended_design(rows({{1, 2}, {2, 4}, {3, 6}}, {0, 1, 1})).rank_ok);
}

TEST(ExtendedDesign, TooFewRows) {
  EXPECT_FALSE(extended_design(rows({{1, 2}, {2, 5}}, {0, 1})).rank_ok);
}

TEST(ExtendedDesign, AllRowsEqualIsNeverFullRank) {
  EXPECT_FALSE(extended_design(rows({{3, -1}, {3, -1}, {3, -1}, {3, -1}}, {0, 1, 0, 1})).rank_ok);
}

TEST(ExtendedDesign, RankInvariantUnderPermutation) {
  const Dataset ds = rows({{1, 2}, {2, 4.5}, {3, 6}, {0, 1}}, {0, 1, 1, 0});
  const bool base = extended_design(ds).rank_ok;
  std::vector<std::size_t> order(ds.n());
  std::iota(order.begin(), order.end(), 0);
  do {
    EXPECT_EQ(extended_design(ds.permuted(order)).rank_ok, base);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(ExtendedDesign, ScaleFreeRankDecision) {
  // Columns of wildly different scale still count as independent.
  EXPECT_TRUE(extended_design(rows({{1e-9, 1e9}, {2e-9, 3e9}, {4e-9, 1e9}}, {0, 1, 0})).rank_ok);
}

TEST(Standardization, MapsToUnitMaxAbs) {
  const Matrix x = (Matrix(4, 2) << 1, 10, 2, 10, 3, 10, 6, 10).finished();
  const Standardization s = Standardization::from(x);
  const Matrix z = s.apply(x);
  EXPECT_DOUBLE_EQ(s.center(0), 3.0);
  EXPECT_DOUBLE_EQ(z.col(0).cwiseAbs().maxCoeff(), 1.0);
  EXPECT_DOUBLE_EQ(s.scale(1), 1.0);  // constant column
  EXPECT_DOUBLE_EQ(z.col(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Permuted, RejectsNonPermutation) {
  const Dataset ds = scalar({1, 2, 3}, {0, 1, 0});
  const std::vector<std::size_t> bad{0, 0, 1};
  EXPECT_THROW(ds.permuted(bad), Error);
}

}  // namespace
}  // namespace binreg
