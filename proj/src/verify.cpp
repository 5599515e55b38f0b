#include "binreg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "binreg/error.hpp"
#include "binreg/kernels.hpp"
#include "binreg/rng.hpp"

namespace binreg {
namespace {

int thresholded_sign(double v, double tol) {
  if (std::abs(v) <= tol) return 0;
  return v > 0 ? 1 : -1;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Vector standardized_delta(const FitResult& fr, const GroupStats& gs) {
  if (fr.standardization.scale.size() != gs.delta.size()) {
    throw DimensionMismatch("fit and group statistics disagree in dimension");
  }
  return gs.delta.cwiseQuotient(fr.standardization.scale);
}

TheoremReport check_sign(const FitResult& fr, const GroupStats& gs, const ZeroTolerances& tol) {
  if (gs.delta.size() != 1) throw DimensionError("sign theorem applies to a scalar predictor");
  if (fr.status != FitStatus::Converged && fr.status != FitStatus::Diverged) {
    throw PreconditionError("sign check needs a Converged or Diverged fit, got " +
                            std::string(to_string(fr.status)));
  }
  const double delta = standardized_delta(fr, gs)(0);
  const double beta = fr.std_beta(0);
  const int sd = thresholded_sign(delta, tol.zero_tol);
  const int sb = thresholded_sign(beta, tol.fit_zero_tol);
  TheoremReport r{Theorem::SignMatch, sd == sb, 0.0, {}};
  r.slack = sd != 0 ? sd * beta : tol.fit_zero_tol - std::abs(beta);
  if (sd != 0 && sb != sd) r.slack = -std::abs(r.slack);
  r.details = "sign(beta)=" + std::to_string(sb) + " sign(delta)=" + std::to_string(sd) +
              " beta_std=" + fmt(beta) + " delta_std=" + fmt(delta) + " status=" +
              std::string(to_string(fr.status));
  return r;
}

TheoremReport check_angle(const FitResult& fr, const GroupStats& gs, const ZeroTolerances& tol) {
  if (fr.status != FitStatus::Converged) {
    throw PreconditionError("angle check needs a Converged fit, got " + std::string(to_string(fr.status)));
  }
  const Vector delta = standardized_delta(fr, gs);
  if (delta.norm() <= tol.zero_tol) {
    throw PreconditionError("mean difference is zero; the zero-coefficient check applies instead");
  }
  TheoremReport r{Theorem::AcuteAngle, false, fr.std_beta.dot(delta), {}};
  r.holds = r.slack > 0;
  const double cosine = r.slack / (fr.std_beta.norm() * delta.norm());
  r.details = "beta^T delta=" + fmt(r.slack) + " cos(angle, standardized)=" + fmt(cosine);
  return r;
}

TheoremReport check_zero_iff(const Dataset& ds, const LinkFamily& link, const FitFn& fit_fn,
                             const ZeroTolerances& tol) {
  const FitResult fr = fit_fn(ds, link);
  TheoremReport r{Theorem::ZeroIffEqualMeans, false, 0.0, {}};
  if (fr.status != FitStatus::Converged && fr.status != FitStatus::NotUnique) {
    r.slack = -std::numeric_limits<double>::infinity();
    r.details = "fit status " + std::string(to_string(fr.status));
    return r;
  }
  const GroupStats gs = group_stats(ds);
  const double dnorm = standardized_delta(fr, gs).norm();
  const double bnorm = fr.std_beta.norm();
  const bool balanced = dnorm <= tol.zero_tol;
  const bool zero_fit = bnorm <= tol.fit_zero_tol;
  const double alpha_star = link.inverse(static_cast<double>(ds.n1()) / static_cast<double>(ds.n()));
  const double alpha_err = std::abs(fr.params.alpha - alpha_star);

  const bool forward = !balanced || (zero_fit && alpha_err <= tol.alpha_tol);
  const bool converse = !zero_fit || balanced;
  r.holds = forward && converse;
  r.slack = balanced ? std::min(tol.fit_zero_tol - bnorm, tol.alpha_tol - alpha_err)
                     : bnorm - tol.fit_zero_tol;
  r.details = "||delta_std||=" + fmt(dnorm) + " ||beta_std||=" + fmt(bnorm) +
              " |alpha-G^-1(n1/n)|=" + fmt(alpha_err) + " status=" + std::string(to_string(fr.status));
  return r;
}

Dataset shift_dataset(const Dataset& ds) {
  const GroupStats gs = group_stats(ds);
  Matrix x = ds.x();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (ds.y()[static_cast<std::size_t>(i)] == 1) x.row(i) -= gs.delta.transpose();
  }
  return Dataset(std::move(x), ds.y());
}

constexpr std::size_t kMaxEmptyLevels = 8;
constexpr std::size_t kMaxSlides = 200;

Parameters grid_mle(const Dataset& ds, const LinkFamily& link, const GridBounds& bounds,
                    std::size_t levels) {
  if (ds.d() > 2 || ds.n() > 20) throw PreconditionError("grid oracle is limited to d <= 2, n <= 20");
  if (bounds.points_per_axis < 3) throw PreconditionError("grid needs at least 3 points per axis");
  const auto q = static_cast<Eigen::Index>(ds.d() + 1);
  const Vector xbar = overall_mean(ds);
  Matrix centred = ds.x();
  centred.rowwise() -= xbar.transpose();
  const Matrix xt = intercept_design(centred);

  Vector half0(q);
  half0(0) = bounds.intercept_half_width;
  half0.tail(q - 1).setConstant(bounds.slope_half_width);
  Vector centre = Vector::Zero(q);
  Vector half = std::move(half0);
  const auto p = static_cast<std::size_t>(bounds.points_per_axis);
  std::size_t total = 1;
  for (Eigen::Index k = 0; k < q; ++k) total *= p;

  // Levels where no grid point has positive likelihood (narrow feasible
  // region of a bounded-support link) shrink the box in place; the boundary
  // test then applies to the first box that saw a finite value.
  Vector best = centre;
  Vector outer;
  std::size_t empty_levels = 0;
  std::size_t slides = 0;
  for (std::size_t level = 0; level < levels;) {
    double best_ll = -std::numeric_limits<double>::infinity();
    bool on_edge = false;
    Vector theta(q);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      bool edge = false;
      for (Eigen::Index k = 0; k < q; ++k) {
        const std::size_t i = rest % p;
        rest /= p;
        edge = edge || i == 0 || i == p - 1;
        theta(k) = centre(k) - half(k) + 2.0 * half(k) * static_cast<double>(i) / static_cast<double>(p - 1);
      }
      const double ll = kernels::serial_loglik(xt, ds.y(), link, theta);
      if (ll > best_ll) {
        best_ll = ll;
        best = theta;
        on_edge = edge;
      }
    }
    if (!std::isfinite(best_ll)) {
      half /= 5.0;
      if (outer.size() == 0 && ++empty_levels <= kMaxEmptyLevels) continue;
      throw OracleBoundsError("likelihood is zero on the whole grid");
    }
    if (outer.size() == 0) outer = half;
    for (Eigen::Index k = 0; k < q; ++k) {
      if (std::abs(best(k)) >= outer(k) * (1.0 - 1e-12)) {
        throw OracleBoundsError("grid optimum on the box boundary (coordinate " + std::to_string(k) +
                                "); the MLE is outside the box or at infinity");
      }
    }
    centre = best;
    // An inner box whose best point is on its edge has lost the optimum along
    // a ridge: slide the box over at the same scale before shrinking again.
    if (on_edge && level > 0 && slides < kMaxSlides) {
      ++slides;
      continue;
    }
    half /= 5.0;
    ++level;
  }
  Parameters out;
  out.beta = best.tail(q - 1);
  out.alpha = best(0) - out.beta.dot(xbar);
  return out;
}

namespace {

constexpr std::size_t kMaxAttempts = 200;

double noise(CounterRng& rng, std::uint64_t family) {
  switch (family) {
    case 0: return rng.normal();
    case 1: return -std::log(1.0 - rng.uniform()) - 1.0;      // skewed
    default: return rng.normal() / std::sqrt(rng.uniform() + 0.02);  // heavy tails
  }
}

}  // namespace

Dataset gen_overlapping(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || n < d + 2) throw PreconditionError("gen_overlapping needs d >= 1 and n >= d + 2");
  const auto dd = static_cast<Eigen::Index>(d);
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    CounterRng rng(seed, attempt);
    const double pi1 = rng.uniform(0.2, 0.8);
    std::vector<int> y(n);
    std::size_t n1 = 0;
    for (auto& v : y) {
      v = rng.uniform() < pi1 ? 1 : 0;
      n1 += static_cast<std::size_t>(v);
    }
    if (n1 == 0 || n1 == n) continue;
    const std::uint64_t family = rng.below(3);
    Matrix loc(2, dd), scale(2, dd);
    for (Eigen::Index j = 0; j < dd; ++j) {
      loc(0, j) = rng.normal();
      loc(1, j) = loc(0, j) + rng.uniform(0.0, 1.5) * rng.normal();
      scale(0, j) = rng.uniform(0.3, 2.0);
      scale(1, j) = rng.uniform(0.3, 2.0);
    }
    Matrix x(static_cast<Eigen::Index>(n), dd);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int g = y[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < dd; ++j) x(i, j) = loc(g, j) + scale(g, j) * noise(rng, family);
    }
    Dataset ds(std::move(x), std::move(y));
    if (!extended_design(ds).rank_ok) continue;
    if (cone_overlap(ds).verdict != OverlapVerdict::Overlap) continue;
    return ds;
  }
  throw GenerationFailure("no overlapping dataset after " + std::to_string(kMaxAttempts) + " attempts");
}

Dataset gen_separated(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || n < 2) throw PreconditionError("gen_separated needs d >= 1 and n >= 2");
  const auto dd = static_cast<Eigen::Index>(d);
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    CounterRng rng(seed, attempt);
    Matrix x(static_cast<Eigen::Index>(n), dd);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < dd; ++j) x(i, j) = rng.normal();
    }
    Vector w(dd);
    for (Eigen::Index j = 0; j < dd; ++j) w(j) = rng.normal();
    if (w.norm() == 0) continue;
    w.normalize();
    const Vector proj = x * w;
    std::vector<double> sorted(proj.data(), proj.data() + proj.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = 1 + static_cast<std::size_t>(rng.below(n - 1));
    if (sorted[k] - sorted[k - 1] < 1e-6) continue;
    const double cut = 0.5 * (sorted[k] + sorted[k - 1]);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = proj(static_cast<Eigen::Index>(i)) > cut ? 1 : 0;
    return Dataset(std::move(x), std::move(y));
  }
  throw GenerationFailure("no separated dataset after " + std::to_string(kMaxAttempts) + " attempts");
}

Dataset gen_balanced(std::size_t n, std::size_t d, std::uint64_t seed) {
  return shift_dataset(gen_overlapping(n, d, seed));
}

Dataset gen_gaussian(std::size_t n, const Vector& mu0, const Vector& mu1, const Matrix& sigma,
                     std::uint64_t seed) {
  const Eigen::Index d = mu0.size();
  if (n < 2 || mu1.size() != d || sigma.rows() != d || sigma.cols() != d) {
    throw DimensionMismatch("gen_gaussian: inconsistent dimensions");
  }
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw PreconditionError("sigma must be positive definite");
  const Matrix l = llt.matrixL();
  CounterRng rng(seed);
  const std::size_t n0 = n - n / 2;
  Matrix x(static_cast<Eigen::Index>(n), d);
  std::vector<int> y(n);
  Vector eps(d);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i < n0 ? 0 : 1;
    for (Eigen::Index j = 0; j < d; ++j) eps(j) = rng.normal();
    x.row(static_cast<Eigen::Index>(i)) = ((y[i] ? mu1 : mu0) + l * eps).transpose();
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset gen_tied_scalar(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw PreconditionError("gen_tied_scalar needs n >= 2");
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    CounterRng rng(seed, attempt);
    const std::uint64_t span = rng.below(4);  // values in {0, ..., span}
    Matrix x(static_cast<Eigen::Index>(n), 1);
    std::vector<int> y(n);
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(rng.below(span + 1));
      y[i] = static_cast<int>(rng.below(2));
      n1 += static_cast<std::size_t>(y[i]);
    }
    if (n1 == 0 || n1 == n) continue;
    return Dataset(std::move(x), std::move(y));
  }
  throw GenerationFailure("no two-group tied dataset generated");
}

Dataset gen_tie_pattern(std::size_t n, TiePattern pattern, std::uint64_t seed) {
  if (n < 3) throw PreconditionError("tie patterns need n >= 3");
  if (pattern == TiePattern::None) throw PreconditionError("gen_tie_pattern needs a tie pattern");
  CounterRng rng(seed);
  const double a = static_cast<double>(rng.below(7)) - 3.0;
  // The "point" group sits at a; the "range" group touches a at one end and
  // extends away from it by one to three units.
  const bool point_is_group0 = pattern == TiePattern::Group0PointAtLowerEndOfGroup1 ||
                               pattern == TiePattern::Group0PointAtUpperEndOfGroup1;
  const double away = (pattern == TiePattern::Group0PointAtLowerEndOfGroup1 ||
                       pattern == TiePattern::Group1PointAtLowerEndOfGroup0)
                          ? 1.0
                          : -1.0;
  const std::size_t n_point = 1 + static_cast<std::size_t>(rng.below(n - 2));
  const std::size_t n_range = n - n_point;
  Matrix x(static_cast<Eigen::Index>(n), 1);
  std::vector<int> y(n);
  const int point_label = point_is_group0 ? 0 : 1;
  for (std::size_t i = 0; i < n_point; ++i) {
    x(static_cast<Eigen::Index>(i), 0) = a;
    y[i] = point_label;
  }
  for (std::size_t r = 0; r < n_range; ++r) {
    const auto i = static_cast<Eigen::Index>(n_point + r);
    double v;
    if (r == 0) {
      v = a;
    } else if (r == 1) {
      v = a + away * static_cast<double>(1 + rng.below(3));
    } else {
      v = a + away * static_cast<double>(rng.below(4));
    }
    x(i, 0) = v;
    y[static_cast<std::size_t>(i)] = 1 - point_label;
  }
  return Dataset(std::move(x), std::move(y));
}

// Suites -------------------------------------------------------------------

namespace {

TrialOutcome run_trial(const SuiteConfig& cfg, std::size_t index) {
  CounterRng rng(cfg.seed, index);
  TrialOutcome out;
  out.index = index;
  out.n = cfg.n_min + static_cast<std::size_t>(rng.below(cfg.n_max - cfg.n_min + 1));
  out.d = cfg.dims[index % cfg.dims.size()];
  const std::uint64_t data_seed = rng.next();
  const LinkFamily& link = *cfg.link;
  const FitFn fit_fn = [&cfg](const Dataset& ds, const LinkFamily& l) { return fit(ds, l, cfg.fit); };
  try {
    switch (cfg.theorem) {
      case Theorem::SignMatch: {
        const Dataset ds = gen_overlapping(out.n, 1, data_seed);
        out.d = 1;
        const FitResult fr = fit(ds, link, cfg.fit);
        if (fr.status != FitStatus::Converged) {
          out.holds = false;
          out.slack = -std::numeric_limits<double>::infinity();
          out.details = "overlapping data but fit status " + std::string(to_string(fr.status));
          break;
        }
        const TheoremReport r = check_sign(fr, group_stats(ds), cfg.tol);
        out.holds = r.holds;
        out.slack = r.slack;
        out.details = r.details;
        break;
      }
      case Theorem::ZeroIffEqualMeans: {
        const Dataset base = gen_overlapping(out.n, out.d, data_seed);
        const TheoremReport balanced = check_zero_iff(shift_dataset(base), link, fit_fn, cfg.tol);
        const TheoremReport original = check_zero_iff(base, link, fit_fn, cfg.tol);
        out.holds = balanced.holds && original.holds;
        out.slack = std::min(balanced.slack, original.slack);
        out.details = "shifted: " + balanced.details + " | original: " + original.details;
        break;
      }
      case Theorem::AcuteAngle: {
        const Dataset ds = gen_overlapping(out.n, out.d, data_seed);
        const FitResult fr = fit(ds, link, cfg.fit);
        const GroupStats gs = group_stats(ds);
        if (fr.status != FitStatus::Converged) {
          out.counted = false;
          out.details = "fit status " + std::string(to_string(fr.status)) + ": " + fr.note;
          break;
        }
        if (standardized_delta(fr, gs).norm() <= cfg.tol.zero_tol) {
          out.counted = false;
          out.details = "mean difference below zero_tol";
          break;
        }
        const TheoremReport r = check_angle(fr, gs, cfg.tol);
        out.holds = r.holds;
        out.slack = r.slack;
        out.details = r.details;
        break;
      }
    }
  } catch (const Error& e) {
    out.holds = false;
    out.slack = -std::numeric_limits<double>::infinity();
    out.details = std::string("error: ") + e.what();
  }
  return out;
}

}  // namespace

SuiteSummary run_suite(const SuiteConfig& cfg) {
  if (cfg.link == nullptr) throw ConfigError("suite needs a link");
  if (cfg.dims.empty()) throw ConfigError("suite needs at least one dimension");
  if (cfg.n_min > cfg.n_max) throw ConfigError("n_min exceeds n_max");
  validate(cfg.fit);
  std::vector<TrialOutcome> outcomes(cfg.trials);
  const auto trials = static_cast<long long>(cfg.trials);

#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < trials; ++i) {
    outcomes[static_cast<std::size_t>(i)] = run_trial(cfg, static_cast<std::size_t>(i));
  }

  SuiteSummary s;
  s.theorem = cfg.theorem;
  s.link = std::string(cfg.link->name());
  s.asserted = certify_log_concavity(*cfg.link).verdict == CertificateVerdict::Certified;
  s.trials = cfg.trials;
  s.worst_slack = std::numeric_limits<double>::infinity();
  for (auto& o : outcomes) {
    if (!o.counted) {
      ++s.skipped;
      continue;
    }
    s.worst_slack = std::min(s.worst_slack, o.slack);
    if (o.holds) {
      ++s.passes;
    } else {
      ++s.failures;
      s.failed.push_back(std::move(o));
    }
  }
  if (s.passes + s.failures == 0) s.worst_slack = 0.0;
  return s;
}

std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::SignMatch: return "sign";
    case Theorem::ZeroIffEqualMeans: return "zero";
    case Theorem::AcuteAngle: return "angle";
  }
  return "?";
}

}  // namespace binreg
