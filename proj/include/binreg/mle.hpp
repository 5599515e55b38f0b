#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "binreg/dataset.hpp"
#include "binreg/links.hpp"

namespace binreg {

struct Parameters {
  double alpha = 0.0;
  Vector beta;
};

enum class FitStatus { Converged, Diverged, MaxIterations, NotUnique };

struct FitOptions {
  double tol = 1e-10;             // on ||score||_inf, standardized scale
  std::size_t max_iter = 200;
  double diverge_bound = 1e4;     // on ||beta||_2, standardized scale
  double armijo = 1e-4;
  std::size_t max_halvings = 50;
  std::size_t starts = 7;         // multi-start count for links without a log-concavity claim
  double step_tol = 1e-6;         // Newton step must also be this small to call it converged
  double rank_tolerance = kDefaultRankTolerance;
  std::size_t parallel_threshold = 4096;
};

/// Throws ConfigError for nonpositive tolerances or bounds.
void validate(const FitOptions& options);

struct FitResult {
  Parameters params;        // original predictor scale
  Vector std_beta;          // slope on the standardized predictors
  Standardization standardization;
  double loglik = 0.0;
  double score_norm = 0.0;  // ||score||_inf at the returned point, standardized scale
  std::size_t iterations = 0;
  FitStatus status = FitStatus::MaxIterations;
  double hessian_condition = 0.0;
  bool multi_start = false;
  std::string note;
};

/// sum_i y_i log G(alpha + x_i^T beta) + (1 - y_i) log(1 - G(alpha + x_i^T beta)),
/// using the link's stable log forms. May be -inf for bounded-support links.
double log_likelihood(const Dataset& ds, const LinkFamily& link, const Parameters& p);

/// Gradient of log_likelihood in (alpha, beta), intercept first.
Vector score(const Dataset& ds, const LinkFamily& link, const Parameters& p);

/// Analytic Hessian of log_likelihood in (alpha, beta), intercept first.
Matrix hessian(const Dataset& ds, const LinkFamily& link, const Parameters& p);

/// Damped Newton ascent on the log likelihood in standardized coordinates.
///
/// Starts at (G^{-1}(n1/n), 0). Each step solves against the negated
/// Hessian, with eigenvalues floored at 1e-10 * trace when it is nearly
/// singular (and absolute values taken where the link is not log-concave),
/// then backtracks by halving under an Armijo condition. A full step along a
/// long direction is doubled while the likelihood keeps rising; this carries
/// iterates quickly past the divergence bound when the data are separated.
///
/// Status:
///  * Converged: ||score||_inf <= tol, short Newton step, -H positive definite.
///  * Diverged: ||beta_std||_2 > diverge_bound with the likelihood still
///    rising, or the likelihood saturated at its supremum 0.
///  * NotUnique: rank-deficient design; params are a maximizer found with
///    the regularized Hessian.
///  * MaxIterations: iteration cap or a stalled line search.
///
/// Links without claims_log_concave() are run from `starts` spread points and
/// the best local optimum is returned with multi_start set.
FitResult fit(const Dataset& ds, const LinkFamily& link, const FitOptions& options = {});

std::string_view to_string(FitStatus s);

/// (1, x_i^T) rows without the rank analysis of extended_design.
Matrix intercept_design(const Matrix& x);

}  // namespace binreg
