#include "binreg/links.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binreg/error.hpp"

namespace binreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

// log(1 + exp(u)) without overflow.
double softplus(double u) { return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mills ratio (1 - Phi(t)) / phi(t) for t >= 8 by backward evaluation of
// Laplace's continued fraction 1 / (t + 1 / (t + 2 / (t + 3 / ...))).
double mills_ratio_tail(double t) {
  double v = t;
  for (int k = 120; k >= 1; --k) v = t + k / v;
  return 1.0 / v;
}

constexpr double kTailSwitch = -8.0;

class Logit final : public LinkFamily {
 public:
  std::string_view name() const override { return "logit"; }
  double cdf(double z) const override { return sigmoid(z); }
  double ccdf(double z) const override { return sigmoid(-z); }
  double pdf(double z) const override { return sigmoid(z) * sigmoid(-z); }
  double pdf_derivative(double z) const override {
    const double p = sigmoid(z);
    const double q = sigmoid(-z);
    return p * q * (q - p);
  }
  bool claims_log_concave() const override { return true; }
  double log_cdf(double z) const override { return -softplus(-z); }
  double log_ccdf(double z) const override { return -softplus(z); }
  LogDerivs log_cdf_derivs(double z) const override {
    const double p = sigmoid(z);
    const double q = sigmoid(-z);
    return {q, -p * q};
  }
  LogDerivs log_ccdf_derivs(double z) const override {
    const double p = sigmoid(z);
    const double q = sigmoid(-z);
    return {-p, -p * q};
  }
  double inverse(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw OutOfRange("logit inverse needs 0 < p < 1");
    return std::log(p) - std::log1p(-p);
  }
};

class Probit final : public LinkFamily {
 public:
  std::string_view name() const override { return "probit"; }
  double cdf(double z) const override { return normal_cdf(z); }
  double ccdf(double z) const override { return normal_cdf(-z); }
  double pdf(double z) const override { return normal_pdf(z); }
  double pdf_derivative(double z) const override { return -z * normal_pdf(z); }
  bool claims_log_concave() const override { return true; }
  double log_cdf(double z) const override { return log_normal_cdf(z); }
  double log_ccdf(double z) const override { return log_normal_cdf(-z); }
  LogDerivs log_cdf_derivs(double z) const override {
    const double lam = normal_hazard_left(z);
    return {lam, -lam * (lam + z)};
  }
  LogDerivs log_ccdf_derivs(double z) const override {
    // d/dz log Phi(-z) = -lam(-z); d2/dz2 = -lam(-z) (lam(-z) - z).
    const double lam = normal_hazard_left(-z);
    return {-lam, -lam * (lam - z)};
  }
  // No closed form: the base class bisection is used.
};

class Cloglog final : public LinkFamily {
 public:
  std::string_view name() const override { return "cloglog"; }
  double cdf(double z) const override { return -std::expm1(-std::exp(z)); }
  double ccdf(double z) const override { return std::exp(-std::exp(z)); }
  double pdf(double z) const override { return std::exp(z - std::exp(z)); }
  double pdf_derivative(double z) const override {
    const double u = std::exp(z);
    return std::exp(z - u) * (1.0 - u);
  }
  bool claims_log_concave() const override { return true; }
  double log_cdf(double z) const override {
    const double u = std::exp(z);
    // log(1 - e^{-u}) = log u - u/2 + u^2/24 - ...
    if (z < -20.0) return z - 0.5 * u + u * u / 24.0;
    return std::log(-std::expm1(-u));
  }
  double log_ccdf(double z) const override { return -std::exp(z); }
  LogDerivs log_cdf_derivs(double z) const override {
    // With u = e^z and h(u) = u / (e^u - 1): d1 = h, d2 = u h'(u) = h (1 - u - h).
    const double u = std::exp(z);
    if (u < 1e-4) return {1.0 - 0.5 * u + u * u / 12.0, -0.5 * u + u * u / 6.0};
    if (u > 745.0) return {0.0, 0.0};
    const double h = u / std::expm1(u);
    return {h, h * (1.0 - u - h)};
  }
  LogDerivs log_ccdf_derivs(double z) const override {
    const double u = std::exp(z);
    return {-u, -u};
  }
  double inverse(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw OutOfRange("cloglog inverse needs 0 < p < 1");
    return std::log(-std::log1p(-p));
  }
};

class Cauchit final : public LinkFamily {
 public:
  std::string_view name() const override { return "cauchit"; }
  // For z < 0, atan(z) / pi + 1/2 = atan(-1/z) / pi, which avoids cancellation.
  double cdf(double z) const override {
    if (z < 0) return std::atan(-1.0 / z) / std::numbers::pi;
    return 0.5 + std::atan(z) / std::numbers::pi;
  }
  double ccdf(double z) const override { return cdf(-z); }
  double pdf(double z) const override { return 1.0 / (std::numbers::pi * (1.0 + z * z)); }
  double pdf_derivative(double z) const override {
    const double s = 1.0 + z * z;
    return -2.0 * z / (std::numbers::pi * s * s);
  }
  double inverse(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw OutOfRange("cauchit inverse needs 0 < p < 1");
    return std::tan(std::numbers::pi * (p - 0.5));
  }
};

class Uniform final : public LinkFamily {
 public:
  std::string_view name() const override { return "uniform"; }
  double cdf(double z) const override { return std::clamp(z, 0.0, 1.0); }
  double ccdf(double z) const override { return std::clamp(1.0 - z, 0.0, 1.0); }
  double pdf(double z) const override { return (z > 0.0 && z < 1.0) ? 1.0 : 0.0; }
  double pdf_derivative(double) const override { return 0.0; }
  Support support() const override { return {0.0, 1.0}; }
  bool claims_log_concave() const override { return true; }
  double log_cdf(double z) const override {
    if (z <= 0.0) return -kInf;
    return z >= 1.0 ? 0.0 : std::log(z);
  }
  double log_ccdf(double z) const override {
    if (z >= 1.0) return -kInf;
    return z <= 0.0 ? 0.0 : std::log1p(-z);
  }
  // At the kinks z = 0 and z = 1 the one-sided limits from inside the
  // support are used.
  LogDerivs log_cdf_derivs(double z) const override {
    if (z > 1.0) return {0.0, 0.0};
    if (z <= 0.0) return {kInf, -kInf};
    return {1.0 / z, -1.0 / (z * z)};
  }
  LogDerivs log_ccdf_derivs(double z) const override {
    if (z < 0.0) return {0.0, 0.0};
    if (z >= 1.0) return {-kInf, -kInf};
    const double s = 1.0 - z;
    return {-1.0 / s, -1.0 / (s * s)};
  }
  double inverse(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw OutOfRange("uniform inverse needs 0 < p < 1");
    return p;
  }
};

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_normal_cdf(double z) {
  if (z < kTailSwitch) return -0.5 * z * z - kLogSqrt2Pi + std::log(mills_ratio_tail(-z));
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  return std::log(normal_cdf(z));
}

double normal_hazard_left(double z) {
  if (z < kTailSwitch) return 1.0 / mills_ratio_tail(-z);
  return normal_pdf(z) / normal_cdf(z);
}

double LinkFamily::log_cdf(double z) const {
  const double g = cdf(z);
  if (g <= 0.5) return std::log(g);
  return std::log1p(-ccdf(z));
}

double LinkFamily::log_ccdf(double z) const {
  const double s = ccdf(z);
  if (s <= 0.5) return std::log(s);
  return std::log1p(-cdf(z));
}

LogDerivs LinkFamily::log_cdf_derivs(double z) const {
  const double g = pdf(z);
  const double G = cdf(z);
  const double r = g / G;
  return {r, pdf_derivative(z) / G - r * r};
}

LogDerivs LinkFamily::log_ccdf_derivs(double z) const {
  const double g = pdf(z);
  const double S = ccdf(z);
  const double r = g / S;
  return {-r, -pdf_derivative(z) / S - r * r};
}

double LinkFamily::inverse(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw OutOfRange(std::string(name()) + " inverse needs 0 < p < 1");
  const Support sup = support();
  double lo = std::max(-1.0, sup.lo);
  double hi = std::min(1.0, sup.hi);
  while (cdf(lo) > p) {
    if (!std::isfinite(lo) || lo < -1e300) throw OutOfRange("cannot bracket inverse");
    lo = std::max(2.0 * lo, sup.lo);
  }
  while (cdf(hi) < p) {
    if (!std::isfinite(hi) || hi > 1e300) throw OutOfRange("cannot bracket inverse");
    hi = std::min(2.0 * hi, sup.hi);
  }
  // Bisection until the bracket cannot shrink; G is monotone on it.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = cdf(mid);
    if (gm == p) return mid;
    if (gm < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(cdf(lo) - p) <= std::abs(cdf(hi) - p) ? lo : hi;
}

const LinkFamily& logit_link() {
  static const Logit link;
  return link;
}
const LinkFamily& probit_link() {
  static const Probit link;
  return link;
}
const LinkFamily& cloglog_link() {
  static const Cloglog link;
  return link;
}
const LinkFamily& cauchit_link() {
  static const Cauchit link;
  return link;
}
const LinkFamily& uniform_link() {
  static const Uniform link;
  return link;
}

std::span<const LinkFamily* const> builtin_links() {
  static const std::array<const LinkFamily*, 5> all{&logit_link(), &probit_link(), &cloglog_link(),
                                                    &cauchit_link(), &uniform_link()};
  return all;
}

const LinkFamily& link_by_name(std::string_view name) {
  for (const LinkFamily* l : builtin_links()) {
    if (l->name() == name) return *l;
  }
  throw UnknownLink("unknown link '" + std::string(name) +
                    "' (expected logit|probit|cloglog|cauchit|uniform)");
}

namespace {

// f(mid) - (f(lo) + f(hi)) / 2 under the +inf convention for convex functions.
double midpoint_violation(double flo, double fmid, double fhi) {
  if (std::isinf(flo) || std::isinf(fhi)) return 0.0;
  if (std::isinf(fmid)) return kInf;
  return fmid - 0.5 * (flo + fhi);
}

}  // namespace

ConcavityCertificate certify_log_concavity(const LinkFamily& link, const GridSpec& spec) {
  ConcavityCertificate cert;
  const double h = spec.step;
  const auto count = static_cast<std::size_t>(std::floor((spec.hi - spec.lo) / h + 1e-9)) + 1;
  cert.grid.reserve(count);
  for (std::size_t k = 0; k < count; ++k) cert.grid.push_back(spec.lo + static_cast<double>(k) * h);

  std::vector<double> centres(cert.grid.begin() + 1, cert.grid.end() - 1);
  const Support sup = link.support();
  for (double e : {sup.lo, sup.hi}) {
    if (std::isfinite(e)) centres.push_back(e);
  }

  auto consider = [&](WitnessKind kind, std::array<double, 3> z, double v, double& running) {
    running = std::max(running, v);
    if (v > spec.tolerance && (!cert.witness || v > cert.witness->violation)) {
      cert.witness = ConcavityWitness{kind, z, v};
    }
  };

  for (double z : centres) {
    const std::array<double, 3> t{z - h, z, z + h};
    consider(WitnessKind::NegLogCdf, t,
             midpoint_violation(-link.log_cdf(t[0]), -link.log_cdf(t[1]), -link.log_cdf(t[2])),
             cert.max_convexity_violation_logG);
    consider(WitnessKind::NegLogCcdf, t,
             midpoint_violation(-link.log_ccdf(t[0]), -link.log_ccdf(t[1]), -link.log_ccdf(t[2])),
             cert.max_convexity_violation_log1mG);
  }

  double gmin = 1.0, gmax = 0.0;
  for (std::size_t k = 0; k < cert.grid.size(); ++k) {
    const double z = cert.grid[k];
    const double G = link.cdf(z);
    gmin = std::min(gmin, G);
    gmax = std::max(gmax, G);
    if (k + 1 < cert.grid.size() && G > 0.0 && G < 1.0) {
      // Near G = 1 the complement resolves differences that G cannot.
      const double next = link.cdf(cert.grid[k + 1]);
      const bool rises = next > G || link.ccdf(cert.grid[k + 1]) < link.ccdf(z);
      if (!rises && next < 1.0) {
        cert.strictly_increasing = false;
        if (!cert.witness) {
          cert.witness =
              ConcavityWitness{WitnessKind::NotStrictlyIncreasing, {z, cert.grid[k + 1], cert.grid[k + 1]}, G - next};
        }
      }
    }
  }

  if (cert.witness) {
    cert.verdict = CertificateVerdict::Refuted;
  } else if (gmin < spec.coverage && gmax > 1.0 - spec.coverage) {
    cert.verdict = CertificateVerdict::Certified;
  } else {
    cert.verdict = CertificateVerdict::Inconclusive;
  }
  return cert;
}

std::string_view to_string(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::Certified: return "certified";
    case CertificateVerdict::Refuted: return "refuted";
    case CertificateVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::NegLogCdf: return "-log G";
    case WitnessKind::NegLogCcdf: return "-log(1-G)";
    case WitnessKind::NotStrictlyIncreasing: return "G not strictly increasing";
  }
  return "?";
}

}  // namespace binreg
