#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <numbers>

#include "binreg/error.hpp"
#include "binreg/mle.hpp"
#include "binreg/rng.hpp"
#include "binreg/verify.hpp"
#include "support.hpp"

namespace binreg {
namespace {

using test::rows;
using test::scalar;

Parameters params(double a, std::initializer_list<double> b) {
  Parameters p;
  p.alpha = a;
  p.beta = Vector(static_cast<Eigen::Index>(b.size()));
  Eigen::Index j = 0;
  for (double v : b) p.beta(j++) = v;
  return p;
}

TEST(LogLikelihood, AllHalvesAtOrigin) {
  const Dataset ds = scalar({0.3, -2, 9, 4}, {1, 1, 0, 0});
  EXPECT_DOUBLE_EQ(log_likelihood(ds, logit_link(), params(0, {0})), -4 * std::log(2.0));
}

TEST(LogLikelihood, BalancedMaximumAtOrigin) {
  const Dataset ds = scalar({0, 1, 2, 3}, {1, 0, 0, 1});
  const double at0 = log_likelihood(ds, logit_link(), params(0, {0}));
  EXPECT_DOUBLE_EQ(at0, -4 * std::log(2.0));
  for (double a : {-0.1, 0.0, 0.1})
    for (double b : {-0.1, 0.0, 0.1})
      EXPECT_LE(log_likelihood(ds, logit_link(), params(a, {b})), at0);
}

TEST(LogLikelihood, ProbitAgainstLongDoubleSum) {
  const std::vector<double> x{1, 3, 2, 4};
  const std::vector<int> y{0, 0, 1, 1};
  long double ref = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double z = -2.0L + x[i];
    ref += y[i] ? std::log(test::normal_cdf_ld(z)) : std::log(test::normal_cdf_ld(-z));
  }
  EXPECT_NEAR(log_likelihood(scalar(x, y), probit_link(), params(-2, {1})), static_cast<double>(ref), 1e-14);
}

TEST(LogLikelihood, UniformOutsideSupportIsMinusInfinity) {
  const Dataset ds = scalar({0, 1}, {1, 0});
  EXPECT_EQ(log_likelihood(ds, uniform_link(), params(-1, {0.5})), -std::numeric_limits<double>::infinity());
}

TEST(Score, ZeroAtBalancedOptimum) {
  const Vector g = score(scalar({0, 1, 2, 3}, {1, 0, 0, 1}), logit_link(), params(0, {0}));
  EXPECT_EQ(g(0), 0.0);
  EXPECT_EQ(g(1), 0.0);
}

TEST(Score, LogitInterceptComponentIsResidualSum) {
  const Dataset ds = scalar({1, 3, 2, 4, 0.5}, {0, 0, 1, 1, 1});
  const Parameters p = params(0.3, {-0.7});
  double sum_p = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) sum_p += logit_link().cdf(p.alpha + p.beta(0) * ds.x()(static_cast<Eigen::Index>(i), 0));
  EXPECT_NEAR(score(ds, logit_link(), p)(0), static_cast<double>(ds.n1()) - sum_p, 1e-14);
}

TEST(Hessian, LogitAtOrigin) {
  const Dataset ds = scalar({0, 1}, {0, 1});
  const Matrix h = hessian(ds, logit_link(), params(0, {0}));
  const Matrix xt = intercept_design(ds.x());
  const Matrix expected = -0.25 * xt.transpose() * xt;
  EXPECT_LE((h - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(h(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(h(0, 1), -0.25);
  EXPECT_DOUBLE_EQ(h(1, 1), -0.25);
}

// Random points around the bulk of the data, inside the support.
struct Point {
  Dataset ds;
  Parameters p;
};

std::vector<Point> random_points(const LinkFamily& link, std::size_t count, std::uint64_t seed) {
  std::vector<Point> out;
  CounterRng rng(seed);
  while (out.size() < count) {
    const std::size_t d = 1 + rng.below(3);
    const Dataset ds = gen_overlapping(8 + rng.below(20), d, rng.next());
    Parameters p;
    p.alpha = rng.uniform(-1, 1);
    p.beta = Vector(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) p.beta(static_cast<Eigen::Index>(j)) = rng.uniform(-1, 1);
    if (link.support().lo > -1e300) {
      // Keep every linear predictor inside (0.05, 0.95) for the uniform link.
      const Vector z = intercept_design(ds.x()) * (Vector(p.beta.size() + 1) << p.alpha, p.beta).finished();
      const double lo = z.minCoeff(), hi = z.maxCoeff();
      const double s = 0.9 / std::max(hi - lo, 1e-12);
      p.beta *= s;
      p.alpha = p.alpha * s + 0.05 - lo * s;
    }
    out.push_back({ds, p});
  }
  return out;
}

Vector theta_of(const Parameters& p) { return (Vector(p.beta.size() + 1) << p.alpha, p.beta).finished(); }
Parameters params_of(const Vector& t) { return {t(0), t.tail(t.size() - 1)}; }

TEST(Score, MatchesCentralDifferences) {
  for (const LinkFamily* l : builtin_links()) {
    for (const Point& pt : random_points(*l, 40, 17)) {
      const Vector g = score(pt.ds, *l, pt.p);
      const Vector t = theta_of(pt.p);
      for (Eigen::Index j = 0; j < t.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(t(j)));
        Vector tp = t, tm = t;
        tp(j) += h;
        tm(j) -= h;
        const double fd = (log_likelihood(pt.ds, *l, params_of(tp)) - log_likelihood(pt.ds, *l, params_of(tm))) / (2 * h);
        EXPECT_LE(std::abs(g(j) - fd), 1e-6 * std::max(1.0, std::abs(fd))) << l->name() << " j=" << j;
      }
    }
  }
}

TEST(Hessian, MatchesDifferencedScoreAndIsSymmetric) {
  for (const LinkFamily* l : builtin_links()) {
    for (const Point& pt : random_points(*l, 40, 23)) {
      const Matrix h = hessian(pt.ds, *l, pt.p);
      EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()));
      const Vector t = theta_of(pt.p);
      for (Eigen::Index j = 0; j < t.size(); ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(t(j)));
        Vector tp = t, tm = t;
        tp(j) += step;
        tm(j) -= step;
        const Vector fd = (score(pt.ds, *l, params_of(tp)) - score(pt.ds, *l, params_of(tm))) / (2 * step);
        EXPECT_LE((h.col(j) - fd).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, fd.cwiseAbs().maxCoeff()))
            << l->name() << " j=" << j;
      }
    }
  }
}

TEST(Hessian, NegativeSemidefiniteForLogConcaveLinks) {
  for (const LinkFamily* l : {&logit_link(), &probit_link(), &cloglog_link(), &uniform_link()}) {
    for (const Point& pt : random_points(*l, 60, 31)) {
      const Matrix h = hessian(pt.ds, *l, pt.p);
      const double top = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().maxCoeff();
      EXPECT_LE(top, 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) << l->name();
    }
  }
}

TEST(Fit, BalancedLogitAtOrigin) {
  const FitResult fr = fit(scalar({0, 1, 2, 3}, {1, 0, 0, 1}), logit_link());
  EXPECT_EQ(fr.status, FitStatus::Converged);
  EXPECT_EQ(fr.params.alpha, 0.0);
  EXPECT_EQ(fr.params.beta(0), 0.0);
  EXPECT_DOUBLE_EQ(fr.loglik, -4 * std::log(2.0));
}

TEST(Fit, BalancedCloglogInterceptIsInverseLink) {
  const FitResult fr = fit(scalar({0, 1, 2, 3}, {1, 0, 0, 1}), cloglog_link());
  EXPECT_EQ(fr.status, FitStatus::Converged);
  EXPECT_NEAR(fr.params.alpha, std::log(std::log(2.0)), 1e-12);
  EXPECT_NEAR(fr.params.beta(0), 0.0, 1e-12);
}

TEST(Fit, OverlappingLogitPositiveSlopeMatchesOracle) {
  const Dataset ds = scalar({1, 3, 2, 4}, {0, 0, 1, 1});
  const FitResult fr = fit(ds, logit_link());
  ASSERT_EQ(fr.status, FitStatus::Converged);
  EXPECT_GT(fr.params.beta(0), 0.0);
  const Parameters g = grid_mle(ds, logit_link());
  EXPECT_NEAR(fr.params.beta(0), g.beta(0), 1e-4);
  EXPECT_NEAR(fr.params.alpha, g.alpha, 1e-4);
  EXPECT_NEAR(fr.loglik, log_likelihood(ds, logit_link(), g), 1e-6);
  EXPECT_LE(fr.score_norm, 1e-10);
}

TEST(Fit, CompleteSeparationDiverges) {
  const FitResult fr = fit(scalar({1, 2, 3, 4}, {0, 0, 1, 1}), logit_link());
  EXPECT_EQ(fr.status, FitStatus::Diverged);
  EXPECT_GT(fr.params.beta(0), 0.0);
  EXPECT_GT(fr.std_beta.norm(), FitOptions{}.diverge_bound);
}

TEST(Fit, QuasiSeparationDivergesForSmoothLinks) {
  const Dataset ds = scalar({2, 2, 2, 5}, {0, 1, 1, 1});
  for (const LinkFamily* l : {&logit_link(), &probit_link(), &cloglog_link(), &cauchit_link()}) {
    const FitResult fr = fit(ds, *l);
    EXPECT_EQ(fr.status, FitStatus::Diverged) << l->name() << " " << fr.note;
    EXPECT_GT(fr.params.beta(0), 0.0) << l->name();
  }
}

TEST(Fit, RankDeficientIsNotUnique) {
  const FitResult fr = fit(rows({{1, 2}, {2, 4}, {3, 6}, {1.5, 3}}, {0, 1, 0, 1}), logit_link());
  EXPECT_EQ(fr.status, FitStatus::NotUnique);
  const FitResult c = fit(scalar({5, 5, 5}, {0, 1, 0}), probit_link());
  EXPECT_EQ(c.status, FitStatus::NotUnique);
}

TEST(Fit, RejectsBadOptions) {
  const Dataset ds = scalar({1, 3, 2, 4}, {0, 0, 1, 1});
  FitOptions o;
  o.tol = 0.0;
  EXPECT_THROW(fit(ds, logit_link(), o), ConfigError);
  o = {};
  o.diverge_bound = -1.0;
  EXPECT_THROW(fit(ds, logit_link(), o), ConfigError);
  o = {};
  o.tol = std::nan("");
  EXPECT_THROW(fit(ds, logit_link(), o), ConfigError);
}

TEST(Fit, CauchitUsesMultiStart) {
  const FitResult fr = fit(gen_overlapping(20, 1, 4), cauchit_link());
  EXPECT_TRUE(fr.multi_start);
  EXPECT_FALSE(fr.note.empty());
  EXPECT_FALSE(fit(gen_overlapping(20, 1, 4), logit_link()).multi_start);
}

TEST(Fit, UniformConvergesOnOverlappingData) {
  std::size_t converged = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Dataset ds = gen_overlapping(25, 1 + s % 2, s);
    const FitResult fr = fit(ds, uniform_link());
    if (fr.status == FitStatus::Converged) {
      ++converged;
      EXPECT_TRUE(std::isfinite(fr.loglik));
      EXPECT_LT(fr.loglik, 0.0);
    }
  }
  EXPECT_EQ(converged, 40u);
}

TEST(Fit, UniformOnSeparatedDataIsNotConverged) {
  const FitResult fr = fit(scalar({1, 2, 3, 4}, {0, 0, 1, 1}), uniform_link());
  EXPECT_NE(fr.status, FitStatus::Converged);
  EXPECT_EQ(fr.loglik, 0.0);
}

TEST(Fit, MonotoneAscentAcrossIterationCaps) {
  // Capping the iteration count exposes the accepted iterates in order. Steps
  // whose predicted gain is below the resolution of the log likelihood are
  // taken unchecked, so ascent holds up to 64 eps |ll|.
  for (const LinkFamily* l : {&logit_link(), &probit_link(), &cloglog_link()}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset ds = gen_overlapping(30, 2, s);
      double prev = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k <= 12; ++k) {
        FitOptions o;
        o.max_iter = k;
        const FitResult fr = fit(ds, *l, o);
        EXPECT_GE(fr.loglik, prev - 64 * std::numeric_limits<double>::epsilon() * std::abs(prev))
            << std::setprecision(17) << fr.loglik - prev << " " << l->name() << " seed " << s << " k=" << k;
        prev = fr.loglik;
        if (fr.status == FitStatus::Converged) break;
      }
    }
  }
}

TEST(Fit, LogitIdentitiesAtOptimum) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Dataset ds = gen_overlapping(10 + s % 30, 1, s);
    const FitResult fr = fit(ds, logit_link());
    ASSERT_EQ(fr.status, FitStatus::Converged);
    const double n = static_cast<double>(ds.n());
    const double n1 = static_cast<double>(ds.n1());
    const double xbar = overall_mean(ds)(0);
    const double xbar1 = group_stats(ds).xbar1(0);
    double sum_p = 0.0, weighted = 0.0;
    for (Eigen::Index i = 0; i < ds.x().rows(); ++i) {
      const double p = logit_link().cdf(fr.params.alpha + fr.params.beta(0) * ds.x()(i, 0));
      sum_p += p;
      weighted += p * (ds.x()(i, 0) - xbar);
    }
    EXPECT_NEAR(sum_p / n, n1 / n, 1e-10);
    EXPECT_NEAR(n1 * (xbar1 - xbar), weighted, 1e-8);
  }
}

TEST(Fit, AffineEquivariance) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Dataset ds = gen_overlapping(20, 1, s);
    const FitResult a = fit(ds, logit_link());
    ASSERT_EQ(a.status, FitStatus::Converged);
    for (auto [scale, shift] : {std::pair{-2.5, 7.0}, std::pair{1e3, -4e4}, std::pair{1e-3, 0.25}}) {
      const Dataset t(ds.x().array() * scale + shift, ds.y());
      const FitResult b = fit(t, logit_link());
      ASSERT_EQ(b.status, FitStatus::Converged);
      EXPECT_NEAR(b.params.beta(0), a.params.beta(0) / scale, 1e-8 * std::abs(a.params.beta(0) / scale) + 1e-12);
      EXPECT_NEAR(b.loglik, a.loglik, 1e-8);
    }
  }
}

TEST(Fit, ConvergedMeansStationaryAndNegativeDefinite) {
  for (const LinkFamily* l : {&logit_link(), &probit_link(), &cloglog_link()}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Dataset ds = gen_overlapping(30, 3, s);
      const FitResult fr = fit(ds, *l);
      ASSERT_EQ(fr.status, FitStatus::Converged) << l->name();
      EXPECT_LE(fr.score_norm, FitOptions{}.tol);
      const Matrix h = hessian(ds, *l, fr.params);
      EXPECT_LT(Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().maxCoeff(), 0.0);
      EXPECT_GE(fr.hessian_condition, 1.0);
    }
  }
}

TEST(Fit, StatusNames) {
  EXPECT_EQ(to_string(FitStatus::Converged), "Converged");
  EXPECT_EQ(to_string(FitStatus::Diverged), "Diverged");
  EXPECT_EQ(to_string(FitStatus::MaxIterations), "MaxIterations");
  EXPECT_EQ(to_string(FitStatus::NotUnique), "NotUnique");
}

}  // namespace
}  // namespace binreg
