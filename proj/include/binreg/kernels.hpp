#pragma once

#include <cstddef>
#include <span>

#include "binreg/dataset.hpp"
#include "binreg/links.hpp"

namespace binreg::kernels {

// Log likelihood of a binary regression and its derivatives with respect to
// theta, where the linear predictor is z = xt * theta and xt already carries
// the intercept column.
//
// Two implementations share one contract:
//  * serial_*: a plain loop, the reference the tests compare against;
//  * parallel_*: rows are cut into fixed-size chunks, chunk partials are
//    computed under OpenMP and summed in chunk order. The chunking does not
//    depend on the thread count, so results are bit-identical for any
//    BINREG_THREADS setting.

struct Evaluation {
  double loglik = 0.0;
  Vector score;    // empty when not requested or loglik is -inf
  Matrix hessian;  // empty when not requested or loglik is -inf
};

enum class Order { Value, Gradient, Hessian };

inline constexpr std::size_t kDefaultChunk = 512;

double serial_loglik(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                     const Vector& theta);
Evaluation serial_evaluate(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                           const Vector& theta, Order order);

double parallel_loglik(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                       const Vector& theta, std::size_t chunk = kDefaultChunk);
Evaluation parallel_evaluate(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                             const Vector& theta, Order order, std::size_t chunk = kDefaultChunk);

/// Chooses the parallel path once n reaches `parallel_threshold` rows.
struct Dispatch {
  std::size_t parallel_threshold = 4096;

  double loglik(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                const Vector& theta) const;
  Evaluation evaluate(const Matrix& xt, std::span<const int> y, const LinkFamily& link,
                      const Vector& theta, Order order) const;
};

}  // namespace binreg::kernels
