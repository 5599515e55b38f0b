#include "binreg/simplex.hpp"

#include <cmath>
#include <vector>

#include "binreg/error.hpp"

namespace binreg {
namespace {

class Tableau {
 public:
  // Rows hold B^{-1} [A | I_art | b]; basis[r] is the column basic in row r.
  Tableau(const Matrix& a, const Vector& b, const SimplexOptions& opt)
      : m_(a.rows()), n_(a.cols()), opt_(opt), t_(a.rows(), a.cols() + a.rows() + 1), basis_(a.rows()) {
    t_.setZero();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
    active_.assign(static_cast<std::size_t>(n_ + m_), true);
  }

  // Runs Bland-rule simplex on objective `c` (length n + m). Returns false if
  // unbounded.
  bool optimize(const Vector& c) {
    for (;;) {
      if (pivots_ >= opt_.max_pivots) throw LPNumericalFailure("simplex pivot limit reached");
      const Vector reduced = reduced_costs(c);
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (active_[static_cast<std::size_t>(j)] && !is_basic(j) && reduced(j) > opt_.pivot_tolerance) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double aij = t_(i, enter);
        if (aij <= opt_.pivot_tolerance) continue;
        const double ratio = t_(i, rhs()) / aij;
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis_[static_cast<std::size_t>(i)] <
                                                    basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  double objective(const Vector& c) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) v += c(basis_[static_cast<std::size_t>(i)]) * t_(i, rhs());
    return v;
  }

  // Pivots zero-valued artificials out of the basis where a structural
  // column can replace them.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!is_basic(j) && std::abs(t_(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) pivot(i, col);
    }
    // A row still carrying an artificial is redundant: its structural part is
    // zero, so it never wins a ratio test. Artificials never re-enter.
    for (Eigen::Index j = n_; j < n_ + m_; ++j) active_[static_cast<std::size_t>(j)] = false;
  }

  Vector solution() const {
    Vector x = Vector::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x(j) = t_(i, rhs());
    }
    return x;
  }

  std::size_t pivots() const { return pivots_; }
  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }

 private:
  Eigen::Index rhs() const { return n_ + m_; }

  bool is_basic(Eigen::Index j) const {
    for (Eigen::Index b : basis_) {
      if (b == j) return true;
    }
    return false;
  }

  Vector reduced_costs(const Vector& c) const {
    Vector r = c;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = c(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) r -= cb * t_.row(i).head(n_ + m_).transpose();
    }
    return r;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
      t_(i, col) = 0.0;
    }
    t_(row, col) = 1.0;
    basis_[static_cast<std::size_t>(row)] = col;
    ++pivots_;
  }

  Eigen::Index m_, n_;
  SimplexOptions opt_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c,
                             const SimplexOptions& options) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw DimensionMismatch("LP data dimensions disagree");
  }
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Tableau tab(a, b, options);

  // Phase one: maximize -sum(artificials).
  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setConstant(-1.0);
  tab.optimize(phase1);
  const double infeasibility = -tab.objective(phase1);
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  LpResult result;
  if (infeasibility > options.feasibility_tolerance * scale) {
    result.status = LpStatus::Infeasible;
    result.pivots = tab.pivots();
    return result;
  }
  tab.expel_artificials();

  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = c;
  const bool bounded = tab.optimize(phase2);
  result.pivots = tab.pivots();
  result.x = tab.solution();
  if (!bounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.objective = c.dot(result.x);

  const double residual = (a * result.x - b).cwiseAbs().maxCoeff();
  if (residual > 1e-7 * scale) {
    throw LPNumericalFailure("simplex lost feasibility (residual " + std::to_string(residual) + ")");
  }
  return result;
}

}  // namespace binreg
