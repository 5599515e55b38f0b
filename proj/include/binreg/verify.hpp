#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "binreg/dataset.hpp"
#include "binreg/links.hpp"
#include "binreg/mle.hpp"
#include "binreg/overlap.hpp"

namespace binreg {

enum class Theorem { SignMatch, ZeroIffEqualMeans, AcuteAngle };

struct TheoremReport {
  Theorem theorem;
  bool holds = false;
  double slack = 0.0;  // signed margin; negative means violated
  std::string details;
};

/// Thresholds, all on standardized predictors.
struct ZeroTolerances {
  double zero_tol = 1e-8;      // ||xbar1 - xbar0|| counts as zero below this
  double fit_zero_tol = 1e-6;  // ||beta_hat|| counts as zero below this
  double alpha_tol = 1e-8;     // |alpha_hat - G^{-1}(n1/n)| in the balanced case
};

/// Mean difference in the fit's standardized coordinates.
Vector standardized_delta(const FitResult& fr, const GroupStats& gs);

/// sign(beta_hat) == sign(xbar1 - xbar0) for d = 1, both thresholded. A
/// Diverged fit carries the sign of its last iterate (sign(+-inf) = +-1).
/// Throws DimensionError if d != 1, PreconditionError unless the fit is
/// Converged or Diverged.
TheoremReport check_sign(const FitResult& fr, const GroupStats& gs, const ZeroTolerances& tol = {});

/// slack = beta_hat^T (xbar1 - xbar0), holds iff slack > 0. Throws
/// PreconditionError unless Converged with a nonzero mean difference.
TheoremReport check_angle(const FitResult& fr, const GroupStats& gs, const ZeroTolerances& tol = {});

using FitFn = std::function<FitResult(const Dataset&, const LinkFamily&)>;

/// Both directions of "beta_hat = 0 iff xbar1 = xbar0" on one dataset; in the
/// balanced case also alpha_hat = G^{-1}(n1/n).
TheoremReport check_zero_iff(const Dataset& ds, const LinkFamily& link, const FitFn& fit_fn,
                             const ZeroTolerances& tol = {});

/// x*_i = x_i - y_i (xbar1 - xbar0): equal group means by construction.
Dataset shift_dataset(const Dataset& ds);

/// Box for the brute-force oracle. The intercept axis is the linear
/// predictor at the overall mean of x, a = alpha + beta^T xbar, which keeps
/// the box aligned with the likelihood's principal axes.
struct GridBounds {
  double intercept_half_width = 64.0;
  double slope_half_width = 64.0;
  std::size_t points_per_axis = 41;
};

/// Nested grid search: evaluate the log likelihood on a full grid, recentre
/// on the best point, shrink the box five-fold, repeat `levels` times. When
/// the best point of an inner box sits on its edge the box is recentred at
/// the same scale first, so a narrow ridge cannot strand the search.
/// Throws PreconditionError unless d <= 2 and n <= 20, OracleBoundsError when
/// the best point sits on the outer box (the optimum is outside or at infinity).
Parameters grid_mle(const Dataset& ds, const LinkFamily& link, const GridBounds& bounds = {},
                    std::size_t levels = 14);

/// Class-conditional draws with per-group location and scale and a mix of
/// normal, skewed and heavy-tailed noise, retried until the cone test reports
/// Overlap and the design has full rank. Requires n >= d + 2.
Dataset gen_overlapping(std::size_t n, std::size_t d, std::uint64_t seed);

/// Labels by a random hyperplane with a strict gap between the groups.
Dataset gen_separated(std::size_t n, std::size_t d, std::uint64_t seed);

/// shift_dataset(gen_overlapping(n, d, seed)).
Dataset gen_balanced(std::size_t n, std::size_t d, std::uint64_t seed);

/// x | y=j ~ Normal(mu_j, sigma); n0 = n - n/2 rows with y = 0 first.
Dataset gen_gaussian(std::size_t n, const Vector& mu0, const Vector& mu1, const Matrix& sigma,
                     std::uint64_t seed);

/// Scalar predictor on a small integer lattice with random labels: ties,
/// touching ranges and all-equal columns occur often.
Dataset gen_tied_scalar(std::size_t n, std::uint64_t seed);

/// Scalar data hitting the given tie pattern exactly.
Dataset gen_tie_pattern(std::size_t n, TiePattern pattern, std::uint64_t seed);

// Property suites -----------------------------------------------------------

struct SuiteConfig {
  Theorem theorem = Theorem::SignMatch;
  const LinkFamily* link = nullptr;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> dims{1};
  std::size_t n_min = 6;
  std::size_t n_max = 40;
  ZeroTolerances tol{};
  FitOptions fit{};
};

struct TrialOutcome {
  std::size_t index = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  bool counted = true;  // false when the trial is outside the theorem's scope
  bool holds = false;
  double slack = 0.0;
  std::string details;
};

struct SuiteSummary {
  Theorem theorem;
  std::string link;
  bool asserted = true;  // false unless certify_log_concavity certifies the link
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::size_t skipped = 0;
  double worst_slack = 0.0;
  std::vector<TrialOutcome> failed;  // in trial order
};

/// Trials run in parallel; each draws from its own (seed, trial) stream and
/// the summary is assembled in trial order, so output is independent of the
/// thread count.
SuiteSummary run_suite(const SuiteConfig& config);

std::string_view to_string(Theorem t);

}  // namespace binreg
