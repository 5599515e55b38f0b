#include <gtest/gtest.h>

#include "binreg/error.hpp"
#include "binreg/simplex.hpp"

namespace binreg {
namespace {

// Standard form with explicit slacks: max 3x + 2y, x + y <= 4, x + 3y <= 6.
TEST(Simplex, SmallLpOptimum) {
  Matrix a(2, 4);
  a << 1, 1, 1, 0,
       1, 3, 0, 1;
  const Vector b = (Vector(2) << 4, 6).finished();
  const Vector c = (Vector(4) << 3, 2, 0, 0).finished();
  const LpResult r = solve_standard_form(a, b, c);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 12.0, 1e-12);
  EXPECT_NEAR(r.x(0), 4.0, 1e-12);
  EXPECT_NEAR(r.x(1), 0.0, 1e-12);
  EXPECT_LE((a * r.x - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(r.x.minCoeff(), 0.0);
}

TEST(Simplex, InteriorVertex) {
  // max x + y, x + 2y <= 4, 3x + y <= 6: optimum at (8/5, 6/5).
  Matrix a(2, 4);
  a << 1, 2, 1, 0,
       3, 1, 0, 1;
  const Vector b = (Vector(2) << 4, 6).finished();
  const Vector c = (Vector(4) << 1, 1, 0, 0).finished();
  const LpResult r = solve_standard_form(a, b, c);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 1.6, 1e-12);
  EXPECT_NEAR(r.x(1), 1.2, 1e-12);
  EXPECT_NEAR(r.objective, 2.8, 1e-12);
}

TEST(Simplex, Infeasible) {
  // x + y = 1 and x + y = 2.
  Matrix a(2, 2);
  a << 1, 1,
       1, 1;
  const Vector b = (Vector(2) << 1, 2).finished();
  const Vector c = Vector::Zero(2);
  EXPECT_EQ(solve_standard_form(a, b, c).status, LpStatus::Infeasible);
}

TEST(Simplex, InfeasibleByNonnegativity) {
  Matrix a(1, 2);
  a << 1, 1;
  const Vector b = (Vector(1) << -1).finished();
  EXPECT_EQ(solve_standard_form(a, b, Vector::Zero(2)).status, LpStatus::Infeasible);
}

TEST(Simplex, Unbounded) {
  // max x, x - y = 1.
  Matrix a(1, 2);
  a << 1, -1;
  const Vector b = (Vector(1) << 1).finished();
  const Vector c = (Vector(2) << 1, 0).finished();
  EXPECT_EQ(solve_standard_form(a, b, c).status, LpStatus::Unbounded);
}

TEST(Simplex, RedundantEqualityRows) {
  Matrix a(3, 3);
  a << 1, 1, 1,
       2, 2, 2,
       1, 0, 0;
  const Vector b = (Vector(3) << 1, 2, 0.25).finished();
  const Vector c = (Vector(3) << 0, 1, 0).finished();
  const LpResult r = solve_standard_form(a, b, c);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 0.75, 1e-12);
  EXPECT_LE((a * r.x - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simplex, BealeCyclingExampleTerminates) {
  // Beale's degenerate LP cycles under the textbook largest-coefficient rule.
  // min -3/4 x4 + 20 x5 - 1/2 x6 + 6 x7 written as a maximization.
  Matrix a(3, 7);
  a << 1, 0, 0, 0.25, -8, -1, 9,
       0, 1, 0, 0.5, -12, -0.5, 3,
       0, 0, 1, 0, 0, 1, 0;
  const Vector b = (Vector(3) << 0, 0, 1).finished();
  const Vector c = (Vector(7) << 0, 0, 0, 0.75, -20, 0.5, -6).finished();
  const LpResult r = solve_standard_form(a, b, c);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 1.25, 1e-12);
  EXPECT_LT(r.pivots, 100u);
}

TEST(Simplex, PhaseOneFeasibilityOnly) {
  Matrix a(2, 3);
  a << 1, -1, 0,
       0, 1, -1;
  const Vector b = Vector::Zero(2);
  const LpResult r = solve_standard_form(a, b, Vector::Zero(3));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_LE((a * r.x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simplex, PivotCapThrows) {
  Matrix a(2, 4);
  a << 1, 1, 1, 0,
       1, 3, 0, 1;
  const Vector b = (Vector(2) << 4, 6).finished();
  const Vector c = (Vector(4) << 3, 2, 0, 0).finished();
  SimplexOptions opt;
  opt.max_pivots = 0;
  EXPECT_THROW(solve_standard_form(a, b, c, opt), LPNumericalFailure);
}

}  // namespace
}  // namespace binreg
