#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace binreg {

/// First and second derivative of log G or log(1 - G) at a point.
struct LogDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
};

struct Support {
  double lo;  // G(z) = 0 for z <= lo
  double hi;  // G(z) = 1 for z >= hi
};

/// Inverse link G: a nondecreasing map R -> [0, 1] with density g.
///
/// Implementations supply G, its complement 1 - G, g and g'. The defaults
/// for the log forms switch to log1p of the complement once the value passes
/// one half; the built-in families override them with closed forms that stay
/// accurate far into the tails, where a diverging fit spends its iterations.
///
/// Log forms return -inf outside the support (G = 0 or G = 1), which is the
/// +inf convention for the negated log functions.
class LinkFamily {
 public:
  virtual ~LinkFamily() = default;

  virtual std::string_view name() const = 0;
  virtual double cdf(double z) const = 0;
  virtual double pdf(double z) const = 0;
  virtual double pdf_derivative(double z) const = 0;
  virtual double ccdf(double z) const { return 1.0 - cdf(z); }
  virtual Support support() const { return {-kInf, kInf}; }

  /// Analytic log-concavity claim for G and 1 - G. User links that do not
  /// know leave this false and rely on certify_log_concavity.
  virtual bool claims_log_concave() const { return false; }

  virtual double log_cdf(double z) const;
  virtual double log_ccdf(double z) const;
  virtual LogDerivs log_cdf_derivs(double z) const;
  virtual LogDerivs log_ccdf_derivs(double z) const;

  /// z with |G(z) - p| <= 1e-12. The default bisects on the support.
  /// Throws OutOfRange unless 0 < p < 1.
  virtual double inverse(double p) const;

 protected:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
};

const LinkFamily& logit_link();
const LinkFamily& probit_link();
const LinkFamily& cloglog_link();
const LinkFamily& cauchit_link();
const LinkFamily& uniform_link();

/// Resolves `logit|probit|cloglog|cauchit|uniform`; throws UnknownLink.
const LinkFamily& link_by_name(std::string_view name);

/// All built-in families, in the order listed above.
std::span<const LinkFamily* const> builtin_links();

// Normal distribution helpers shared with the probit link.
double normal_cdf(double z);
double normal_pdf(double z);
double log_normal_cdf(double z);
/// phi(z) / Phi(z), accurate for very negative z.
double normal_hazard_left(double z);

struct GridSpec {
  double lo = -12.0;
  double hi = 12.0;
  double step = 1e-2;
  double tolerance = 1e-9;
  /// The grid must reach G < coverage and G > 1 - coverage to certify.
  double coverage = 1e-4;
};

enum class CertificateVerdict { Certified, Refuted, Inconclusive };

enum class WitnessKind { NegLogCdf, NegLogCcdf, NotStrictlyIncreasing };

struct ConcavityWitness {
  WitnessKind kind;
  std::array<double, 3> z;  // (z - h, z, z + h); the last entry repeats for monotonicity witnesses
  double violation;
};

struct ConcavityCertificate {
  std::vector<double> grid;
  double max_convexity_violation_logG = 0.0;
  double max_convexity_violation_log1mG = 0.0;
  bool strictly_increasing = true;
  CertificateVerdict verdict = CertificateVerdict::Inconclusive;
  std::optional<ConcavityWitness> witness;
};

/// Midpoint-convexity check of -log G and -log(1 - G) on every grid triple
/// (z - h, z, z + h), plus triples centred on finite support endpoints, and a
/// strict-increase check of G wherever 0 < G < 1 on the grid.
ConcavityCertificate certify_log_concavity(const LinkFamily& link, const GridSpec& spec = {});

std::string_view to_string(CertificateVerdict v);
std::string_view to_string(WitnessKind k);

}  // namespace binreg
