#pragma once

#include <cmath>
#include <vector>

#include "binreg/dataset.hpp"
#include "binreg/links.hpp"

namespace binreg::test {

inline Dataset scalar(const std::vector<double>& x, const std::vector<int>& y) {
  Matrix m(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = x[i];
  return Dataset(std::move(m), y);
}

inline Dataset rows(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
  Matrix m(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.front().size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
    }
  }
  return Dataset(std::move(m), y);
}

// Extended-precision references, written out from the textbook formulas.
inline long double logistic_log_cdf_ld(long double z) { return -std::log1p(std::exp(-z)); }
inline long double logistic_cdf_ld(long double z) { return 1.0L / (1.0L + std::exp(-z)); }
inline long double normal_cdf_ld(long double z) { return 0.5L * std::erfc(-z / std::sqrt(2.0L)); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace binreg::test
