#include "binreg/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "binreg/error.hpp"

namespace binreg::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_shapes(const Matrix& xt, std::span<const int> y, const Vector& theta) {
  if (static_cast<std::size_t>(xt.rows()) != y.size() || xt.cols() != theta.size()) {
    throw DimensionMismatch("design, labels and parameter vector disagree in size");
  }
}

// Rows [begin, end) of the sum. Derivative weights are only filled when the
// value is finite.
Evaluation evaluate_rows(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                         const Vector& theta, Order order, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index len = end - begin;
  const Vector z = xt.middleRows(begin, len) * theta;
  Evaluation out;
  Vector d1, d2;
  if (order != Order::Value) d1.resize(len);
  if (order == Order::Hessian) d2.resize(len);
  for (Eigen::Index r = 0; r < len; ++r) {
    const bool one = y[static_cast<std::size_t>(begin + r)] == 1;
    const double term = one ? link.log_cdf(z(r)) : link.log_ccdf(z(r));
    out.loglik += term;
    if (out.loglik == kNegInf) return out;
    if (order == Order::Value) continue;
    const LogDerivs ld = one ? link.log_cdf_derivs(z(r)) : link.log_ccdf_derivs(z(r));
    d1(r) = ld.d1;
    if (order == Order::Hessian) d2(r) = ld.d2;
  }
  if (order != Order::Value) out.score = xt.middleRows(begin, len).transpose() * d1;
  if (order == Order::Hessian) {
    const auto rows = xt.middleRows(begin, len);
    out.hessian = rows.transpose() * d2.asDiagonal() * rows;
  }
  return out;
}

}  // namespace

double serial_loglik(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                     const Vector& theta) {
  check_shapes(xt, y, theta);
  const Vector z = xt * theta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    ll += y[static_cast<std::size_t>(i)] == 1 ? link.log_cdf(z(i)) : link.log_ccdf(z(i));
    if (ll == kNegInf) break;
  }
  return ll;
}

Evaluation serial_evaluate(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                           const Vector& theta, Order order) {
  check_shapes(xt, y, theta);
  return evaluate_rows(xt, y, link, theta, order, 0, xt.rows());
}

Evaluation parallel_evaluate(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                             const Vector& theta, Order order, std::size_t chunk) {
  check_shapes(xt, y, theta);
  if (chunk == 0) chunk = kDefaultChunk;
  const auto n = static_cast<long long>(xt.rows());
  const auto c = static_cast<long long>(chunk);
  const long long nchunks = (n + c - 1) / c;
  std::vector<Evaluation> partial(static_cast<std::size_t>(nchunks));

#pragma omp parallel for schedule(static)
  for (long long k = 0; k < nchunks; ++k) {
    const long long begin = k * c;
    const long long end = begin + c < n ? begin + c : n;
    partial[static_cast<std::size_t>(k)] = evaluate_rows(xt, y, link, theta, order, begin, end);
  }

  const Eigen::Index p = xt.cols();
  Evaluation out;
  if (order != Order::Value) out.score = Vector::Zero(p);
  if (order == Order::Hessian) out.hessian = Matrix::Zero(p, p);
  for (const Evaluation& e : partial) {
    out.loglik += e.loglik;
    if (out.loglik == kNegInf) return Evaluation{kNegInf, {}, {}};
    if (order != Order::Value) out.score += e.score;
    if (order == Order::Hessian) out.hessian += e.hessian;
  }
  return out;
}

double parallel_loglik(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                       const Vector& theta, std::size_t chunk) {
  return parallel_evaluate(xt, y, link, theta, Order::Value, chunk).loglik;
}

double Dispatch::loglik(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                        const Vector& theta) const {
  if (static_cast<std::size_t>(xt.rows()) >= parallel_threshold) {
    return parallel_loglik(xt, y, link, theta);
  }
  return serial_loglik(xt, y, link, theta);
}

Evaluation Dispatch::evaluate(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                              const Vector& theta, Order order) const {
  if (static_cast<std::size_t>(xt.rows()) >= parallel_threshold) {
    return parallel_evaluate(xt, y, link, theta, order);
  }
  return serial_evaluate(xt, y, link, theta, order);
}

}  // namespace binreg::kernels
