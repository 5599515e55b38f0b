#include "binreg/mle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "binreg/error.hpp"
#include "binreg/kernels.hpp"

namespace binreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Steps shorter than this are never extrapolated.
constexpr double kExpandMinStep = 1e-2;

struct Problem {
  Matrix xs;  // standardized design with intercept column
  std::span<const int> y;
  const LinkFamily& link;
  kernels::Dispatch kernels;
  bool log_concave;
  bool rank_ok;
  bool unbounded_support;
};

struct Run {
  Vector theta;
  double loglik = -kInf;
  double score_norm = kInf;
  std::size_t iterations = 0;
  FitStatus status = FitStatus::MaxIterations;
  double condition = kInf;
  std::string note;
};

struct Direction {
  Vector step;
  bool negative_definite = false;
  double condition = kInf;
};

// Modified Newton direction: eigenvalues of -H are floored at 1e-10 * trace;
// for links without a concavity claim negative curvature is flipped.
Direction newton_direction(const Matrix& h, const Vector& g, bool log_concave) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(-h);
  const Vector& lam = es.eigenvalues();
  const double trace = lam.cwiseAbs().sum();
  Direction dir;
  dir.step = Vector::Zero(g.size());
  if (!(trace > 0.0) || !std::isfinite(trace)) return dir;
  const double floor = 1e-10 * trace;
  const double lmin = lam.minCoeff();
  dir.negative_definite = lmin > floor;
  dir.condition = lmin > 0 ? lam.maxCoeff() / lmin : kInf;
  Vector inv(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double v = log_concave ? lam(k) : std::abs(lam(k));
    inv(k) = 1.0 / std::max(v, floor);
  }
  const Matrix& v = es.eigenvectors();
  dir.step = v * inv.asDiagonal() * (v.transpose() * g);
  return dir;
}

double slope_norm(const Vector& theta) { return theta.tail(theta.size() - 1).norm(); }

// With full rank and unbounded support a finite point cannot have a singular
// Hessian unless fitted probabilities have saturated. Walk along the flattest
// eigendirection; if the likelihood never drops before the divergence bound
// the supremum is at infinity. On success theta is moved to the far point.
bool escapes(const Problem& pb, Vector& theta, kernels::Evaluation& eval, const FitOptions& opt) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(-eval.hessian);
  Vector v = es.eigenvectors().col(0);
  if (v.tail(v.size() - 1).norm() == 0.0) return false;
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(eval.loglik));
  for (const double sign : {1.0, -1.0}) {
    Vector dir = sign * v;
    Vector probe = theta;
    double s = 1.0;
    bool ok = true;
    while (slope_norm(probe) <= opt.diverge_bound) {
      probe = theta + s * dir;
      const double ll = pb.kernels.loglik(pb.xs, pb.y, pb.link, probe);
      if (!(std::isfinite(ll) && ll >= eval.loglik - slack)) {
        ok = false;
        break;
      }
      s *= 2.0;
    }
    if (ok) {
      theta = std::move(probe);
      eval = pb.kernels.evaluate(pb.xs, pb.y, pb.link, theta, kernels::Order::Hessian);
      return true;
    }
  }
  return false;
}

Run newton(const Problem& pb, Vector theta, const FitOptions& opt) {
  Run run;
  auto eval = pb.kernels.evaluate(pb.xs, pb.y, pb.link, theta, kernels::Order::Hessian);
  if (!std::isfinite(eval.loglik)) {
    run.theta = std::move(theta);
    run.note = "starting point has zero likelihood";
    return run;
  }
  bool finished = false;
  for (std::size_t it = 0; it <= opt.max_iter && !finished; ++it) {
    run.iterations = it;
    const double gnorm = eval.score.cwiseAbs().maxCoeff();
    run.score_norm = gnorm;
    if (eval.loglik == 0.0 && pb.unbounded_support) {
      // Every fitted probability rounds to its label: only reachable by
      // running off to infinity along a separating direction.
      run.status = FitStatus::Diverged;
      run.note = "likelihood saturated at 1";
      break;
    }
    const Direction dir = newton_direction(eval.hessian, eval.score, pb.log_concave);
    run.condition = dir.condition;
    const double step_len = dir.step.cwiseAbs().maxCoeff();
    if (gnorm <= opt.tol && step_len <= opt.step_tol) {
      if (dir.negative_definite) {
        run.status = pb.rank_ok ? FitStatus::Converged : FitStatus::NotUnique;
      } else if (pb.log_concave && pb.rank_ok && pb.unbounded_support &&
                 escapes(pb, theta, eval, opt)) {
        run.status = FitStatus::Diverged;
        run.note = "likelihood flat out to the divergence bound";
      } else if (pb.log_concave || !pb.rank_ok) {
        run.status = FitStatus::NotUnique;
        if (pb.rank_ok) run.note = "flat maximum: Hessian singular at the optimum";
      } else {
        run.note = "stationary point is not a local maximum";
      }
      break;
    }
    if (gnorm <= opt.tol && pb.log_concave && pb.rank_ok && pb.unbounded_support &&
        escapes(pb, theta, eval, opt)) {
      // Long steps with a vanishing score: probabilities are saturating and
      // Newton only crawls outward, about one unit per iteration.
      run.status = FitStatus::Diverged;
      run.note = "likelihood flat out to the divergence bound";
      break;
    }
    if (it == opt.max_iter) break;

    const double slope = eval.score.dot(dir.step);
    double t = 1.0;
    double ll_t = -kInf;
    bool accepted = false;
    // Predicted gain below the resolution of the log likelihood: the
    // comparison is noise, so take the plain Newton step.
    const bool in_noise =
        slope <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(eval.loglik));
    for (std::size_t h = 0; h <= opt.max_halvings; ++h) {
      ll_t = pb.kernels.loglik(pb.xs, pb.y, pb.link, theta + t * dir.step);
      if (std::isfinite(ll_t) &&
          (in_noise || (ll_t > eval.loglik && ll_t >= eval.loglik + opt.armijo * t * slope))) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (gnorm <= opt.tol && dir.negative_definite) {
        run.status = pb.rank_ok ? FitStatus::Converged : FitStatus::NotUnique;
      } else {
        run.note = "line search failed";
      }
      break;
    }
    if (t == 1.0 && pb.rank_ok && step_len > kExpandMinStep) {
      while (slope_norm(theta + t * dir.step) <= opt.diverge_bound) {
        const double ll2 = pb.kernels.loglik(pb.xs, pb.y, pb.link, theta + 2.0 * t * dir.step);
        if (!(std::isfinite(ll2) && ll2 >= ll_t)) break;
        t *= 2.0;
        ll_t = ll2;
      }
    }
    theta += t * dir.step;
    eval = pb.kernels.evaluate(pb.xs, pb.y, pb.link, theta, kernels::Order::Hessian);
    run.iterations = it + 1;
    if (slope_norm(theta) > opt.diverge_bound) {
      run.status = FitStatus::Diverged;
      run.score_norm = eval.score.size() ? eval.score.cwiseAbs().maxCoeff() : kInf;
      finished = true;
    }
  }
  run.theta = std::move(theta);
  run.loglik = eval.loglik;
  return run;
}

// Bounded support -----------------------------------------------------------
//
// With a finite support endpoint the log likelihood is concave but only
// piecewise smooth: a y=1 row has a kink where its linear predictor reaches
// the upper endpoint (log G is flat beyond it), a y=0 row where it reaches the
// lower one. Rows on a kink are held there as equality constraints; Newton
// runs in the null space of the held rows, each step stops at the first new
// kink, and a held row is released when its multiplier leaves the
// superdifferential of its own term.

enum class Piece { Inside, Flat, Held };

struct Pieces {
  std::vector<Piece> piece;
  std::vector<double> kink;       // endpoint the row can sit on
  std::vector<double> inside_d1;  // one-sided derivative of its term at the kink
};

Pieces classify(const Problem& pb, const Vector& z, const std::vector<Piece>& release) {
  const Support sup = pb.link.support();
  const auto n = static_cast<std::size_t>(z.size());
  Pieces out{std::vector<Piece>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const bool one = pb.y[i] == 1;
    const double k = one ? sup.hi : sup.lo;
    out.kink[i] = k;
    if (!std::isfinite(k)) {
      out.piece[i] = Piece::Inside;
      continue;
    }
    out.inside_d1[i] = one ? pb.link.log_cdf_derivs(k).d1 : pb.link.log_ccdf_derivs(k).d1;
    if (release[i] != Piece::Held) {
      out.piece[i] = release[i];
    } else if (std::abs(z(r) - k) <= 1e-10 * std::max(1.0, std::abs(k))) {
      out.piece[i] = Piece::Held;
    } else {
      out.piece[i] = (one ? z(r) < k : z(r) > k) ? Piece::Inside : Piece::Flat;
    }
  }
  return out;
}

// Rank-revealing split of the held rows: an orthonormal basis of their null
// space and a solver for multipliers.
struct HeldSystem {
  std::vector<std::size_t> rows;
  Matrix a;     // held rows of the design
  Matrix null;  // columns span {v : a v = 0}
};

HeldSystem held_system(const Problem& pb, const Pieces& pc) {
  HeldSystem hs;
  for (std::size_t i = 0; i < pc.piece.size(); ++i) {
    if (pc.piece[i] == Piece::Held) hs.rows.push_back(i);
  }
  const Eigen::Index p = pb.xs.cols();
  if (hs.rows.empty()) {
    hs.null = Matrix::Identity(p, p);
    return hs;
  }
  hs.a.resize(static_cast<Eigen::Index>(hs.rows.size()), p);
  for (std::size_t k = 0; k < hs.rows.size(); ++k) {
    hs.a.row(static_cast<Eigen::Index>(k)) = pb.xs.row(static_cast<Eigen::Index>(hs.rows[k]));
  }
  const Eigen::JacobiSVD<Matrix> svd(hs.a, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  hs.null = svd.matrixV().rightCols(p - rank);
  return hs;
}

Run active_set(const Problem& pb, Vector theta, const FitOptions& opt) {
  Run run;
  const auto n = static_cast<std::size_t>(pb.xs.rows());
  const Eigen::Index p = pb.xs.cols();
  double ll = pb.kernels.loglik(pb.xs, pb.y, pb.link, theta);
  if (!std::isfinite(ll)) {
    run.theta = std::move(theta);
    run.note = "starting point has zero likelihood";
    return run;
  }
  std::vector<Piece> release(n, Piece::Held);  // Held here means "no override"
  const std::size_t cap = opt.max_iter + n;
  for (std::size_t it = 0; it <= cap; ++it) {
    run.iterations = it;
    const Vector z = pb.xs * theta;
    const Pieces pc = classify(pb, z, release);
    const auto released = static_cast<std::size_t>(
        std::find_if(release.begin(), release.end(), [](Piece q) { return q != Piece::Held; }) -
        release.begin());
    std::fill(release.begin(), release.end(), Piece::Held);

    Vector g = Vector::Zero(p);
    Matrix h = Matrix::Zero(p, p);
    for (std::size_t i = 0; i < n; ++i) {
      if (pc.piece[i] != Piece::Inside) continue;
      const auto r = static_cast<Eigen::Index>(i);
      const LogDerivs ld = pb.y[i] == 1 ? pb.link.log_cdf_derivs(z(r)) : pb.link.log_ccdf_derivs(z(r));
      g += ld.d1 * pb.xs.row(r).transpose();
      h += ld.d2 * pb.xs.row(r).transpose() * pb.xs.row(r);
    }
    const HeldSystem hs = held_system(pb, pc);
    const Vector gr = hs.null.transpose() * g;
    const Matrix hr = hs.null.transpose() * h * hs.null;
    const double grn = gr.size() ? gr.cwiseAbs().maxCoeff() : 0.0;

    Vector lam;
    bool nd = true;
    double condition = kInf;
    Matrix u;
    if (hr.size()) {
      const Eigen::SelfAdjointEigenSolver<Matrix> es(-hr);
      lam = es.eigenvalues();
      u = es.eigenvectors();
      const double trace = lam.cwiseAbs().sum();
      nd = trace > 0 && lam.minCoeff() > 1e-10 * trace;
      condition = lam.minCoeff() > 0 ? lam.maxCoeff() / lam.minCoeff() : kInf;
    } else {
      condition = 1.0;
    }
    run.condition = condition;

    // Multipliers: g + a^T c = 0 on the held rows.
    Vector c;
    double kkt = grn;
    std::size_t worst = n;
    double worst_excess = 0.0;
    double tightest = kInf;  // distance of the multipliers from their interval ends
    if (!hs.rows.empty()) {
      c = hs.a.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-g);
      for (std::size_t k = 0; k < hs.rows.size(); ++k) {
        const std::size_t i = hs.rows[k];
        const double ck = c(static_cast<Eigen::Index>(k));
        const double lo = std::min(0.0, pc.inside_d1[i]);
        const double hi = std::max(0.0, pc.inside_d1[i]);
        const double excess = std::max(lo - ck, ck - hi);
        tightest = std::min(tightest, std::abs(ck));
        if (excess > worst_excess) {
          worst_excess = excess;
          worst = i;
        }
      }
      kkt = std::max(grn, worst_excess);
    }
    run.score_norm = kkt;

    if (grn <= opt.tol) {
      if (worst_excess <= opt.tol) {
        // A zero multiplier lets its row slide onto the flat piece for free.
        const bool unique = (hr.size() == 0 || nd) && tightest > opt.tol && ll < 0.0;
        run.status = unique && pb.rank_ok ? FitStatus::Converged : FitStatus::NotUnique;
        if (!unique && pb.rank_ok) run.note = "flat maximum: likelihood constant along a direction";
        break;
      }
      // Let the worst row leave its kink towards the side its multiplier
      // points to: past the inside derivative it moves inside, below zero it
      // moves onto the flat piece.
      const double ck = c(static_cast<Eigen::Index>(
          std::find(hs.rows.begin(), hs.rows.end(), worst) - hs.rows.begin()));
      const bool towards_inside = pc.inside_d1[worst] > 0 ? ck > pc.inside_d1[worst] : ck < pc.inside_d1[worst];
      release[worst] = towards_inside ? Piece::Inside : Piece::Flat;
      continue;
    }
    if (it == cap) break;

    // Newton step in the null space; directions without curvature follow the
    // gradient until a kink stops them.
    Vector step_r = Vector::Zero(gr.size());
    const double trace = lam.size() ? lam.cwiseAbs().sum() : 0.0;
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const double v = pb.log_concave ? lam(k) : std::abs(lam(k));
      const double proj = u.col(k).dot(gr);
      step_r += u.col(k) * (v > 1e-10 * trace ? proj / v : proj * 1e6);
    }
    const Vector dir = hs.null * step_r;
    const Vector dz = pb.xs * dir;

    double t_max = 1.0;
    std::size_t blocking = n;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      if (i == released || pc.piece[i] == Piece::Held || !std::isfinite(pc.kink[i]) || dz(r) == 0.0) {
        continue;
      }
      const double gap = pc.kink[i] - z(r);
      const double s = gap / dz(r);
      if (s > 0.0 && s < t_max) {
        t_max = s;
        blocking = i;
      }
    }

    const double slope = g.dot(dir);
    const bool in_noise =
        slope <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ll));
    double t = t_max;
    double ll_t = -kInf;
    bool accepted = false;
    for (std::size_t k = 0; k <= opt.max_halvings; ++k) {
      ll_t = pb.kernels.loglik(pb.xs, pb.y, pb.link, theta + t * dir);
      if (std::isfinite(ll_t) && (in_noise || (ll_t > ll && ll_t >= ll + opt.armijo * t * slope))) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      run.note = "line search failed";
      break;
    }
    theta += t * dir;
    if (t == t_max && blocking < n) {
      // Land exactly on the kink.
      const auto r = static_cast<Eigen::Index>(blocking);
      const double miss = pc.kink[blocking] - pb.xs.row(r).dot(theta);
      theta += miss * pb.xs.row(r).transpose() / pb.xs.row(r).squaredNorm();
      ll_t = pb.kernels.loglik(pb.xs, pb.y, pb.link, theta);
    }
    ll = ll_t;
    run.iterations = it + 1;
    if (slope_norm(theta) > opt.diverge_bound) {
      run.status = FitStatus::Diverged;
      break;
    }
  }
  run.loglik = ll;
  run.theta = std::move(theta);
  return run;
}

bool better(const Run& a, const Run& b) {
  const bool ca = a.status == FitStatus::Converged;
  const bool cb = b.status == FitStatus::Converged;
  if (ca != cb) return ca;
  return a.loglik > b.loglik;
}

}  // namespace

void validate(const FitOptions& o) {
  if (!(o.tol > 0)) throw ConfigError("tol must be positive");
  if (!(o.diverge_bound > 0)) throw ConfigError("diverge_bound must be positive");
  if (!(o.armijo > 0 && o.armijo < 1)) throw ConfigError("armijo factor must lie in (0, 1)");
  if (!(o.step_tol > 0)) throw ConfigError("step_tol must be positive");
  if (!(o.rank_tolerance > 0)) throw ConfigError("rank_tolerance must be positive");
  if (o.starts == 0) throw ConfigError("starts must be at least 1");
}

Matrix intercept_design(const Matrix& x) {
  Matrix xt(x.rows(), x.cols() + 1);
  xt.col(0).setOnes();
  xt.rightCols(x.cols()) = x;
  return xt;
}

namespace {

Vector stack(const Parameters& p) {
  Vector theta(p.beta.size() + 1);
  theta(0) = p.alpha;
  theta.tail(p.beta.size()) = p.beta;
  return theta;
}

void check_params(const Dataset& ds, const Parameters& p) {
  if (static_cast<std::size_t>(p.beta.size()) != ds.d()) {
    throw DimensionMismatch("beta has " + std::to_string(p.beta.size()) + " entries, data have d=" +
                            std::to_string(ds.d()));
  }
}

}  // namespace

double log_likelihood(const Dataset& ds, const LinkFamily& link, const Parameters& p) {
  check_params(ds, p);
  return kernels::serial_loglik(intercept_design(ds.x()), ds.y(), link, stack(p));
}

Vector score(const Dataset& ds, const LinkFamily& link, const Parameters& p) {
  check_params(ds, p);
  return kernels::serial_evaluate(intercept_design(ds.x()), ds.y(), link, stack(p),
                                  kernels::Order::Gradient)
      .score;
}

Matrix hessian(const Dataset& ds, const LinkFamily& link, const Parameters& p) {
  check_params(ds, p);
  return kernels::serial_evaluate(intercept_design(ds.x()), ds.y(), link, stack(p),
                                  kernels::Order::Hessian)
      .hessian;
}

FitResult fit(const Dataset& ds, const LinkFamily& link, const FitOptions& options) {
  validate(options);
  FitResult result;
  result.standardization = Standardization::from(ds.x());
  const Support sup = link.support();
  const Problem pb{intercept_design(result.standardization.apply(ds.x())),
                   ds.y(),
                   link,
                   kernels::Dispatch{options.parallel_threshold},
                   link.claims_log_concave(),
                   extended_design(ds, options.rank_tolerance).rank_ok,
                   std::isinf(sup.lo) && std::isinf(sup.hi)};

  const auto d = static_cast<Eigen::Index>(ds.d());
  Vector theta0 = Vector::Zero(d + 1);
  theta0(0) = link.inverse(static_cast<double>(ds.n1()) / static_cast<double>(ds.n()));

  Run best;
  if (pb.log_concave) {
    best = pb.unbounded_support ? newton(pb, theta0, options) : active_set(pb, theta0, options);
  } else {
    // Spread starts along the standardized mean-difference direction.
    const GroupStats gs = group_stats(ds);
    Vector dir = gs.delta.cwiseQuotient(result.standardization.scale);
    if (dir.norm() > 0) {
      dir.normalize();
    } else {
      dir = Vector::Unit(d, 0);
    }
    bool first = true;
    for (std::size_t k = 0; k < options.starts; ++k) {
      // 0, +1, -1, +2, -2, ...
      const double offset = static_cast<double>((k + 1) / 2) * (k % 2 == 1 ? 1.0 : -1.0);
      Vector start = theta0;
      start.tail(d) = offset * dir;
      Run r = pb.unbounded_support ? newton(pb, start, options) : active_set(pb, start, options);
      if (first || better(r, best)) best = std::move(r);
      first = false;
    }
    result.multi_start = true;
    best.note = (best.note.empty() ? "" : best.note + "; ") + "best of " +
                std::to_string(options.starts) +
                " starts; link is not log-concave so the optimum may be local";
  }

  result.status = best.status;
  result.loglik = best.loglik;
  result.score_norm = best.score_norm;
  result.iterations = best.iterations;
  result.hessian_condition = best.condition;
  result.note = best.note;
  result.std_beta = best.theta.tail(d);
  result.params.beta = result.std_beta.cwiseQuotient(result.standardization.scale);
  result.params.alpha = best.theta(0) - result.params.beta.dot(result.standardization.center);
  return result;
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Converged: return "Converged";
    case FitStatus::Diverged: return "Diverged";
    case FitStatus::MaxIterations: return "MaxIterations";
    case FitStatus::NotUnique: return "NotUnique";
  }
  return "?";
}

}  // namespace binreg
