#pragma once

#include <cstdlib>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "twocx/integer.hpp"

namespace twocx {

/// Result of a Smith normal form computation: `U * A * V == D` with `U`, `V`
/// unimodular and `D` diagonal, `D(0,0) | D(1,1) | ...`, nonnegative.
template <typename Scalar>
struct SmithDecomposition {
  Matrix<Scalar> D;
  Matrix<Scalar> U;
  Matrix<Scalar> V;
  Eigen::Index rank = 0;

  /// Nonzero diagonal entries in order.
  std::vector<Scalar> invariants() const {
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(rank));
    for (Eigen::Index i = 0; i < rank; ++i) out.push_back(D(i, i));
    return out;
  }
};

/// Exact test for the zero matrix.
template <typename Derived>
bool all_zero(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (a(r, c) != Scalar(0)) return false;
  return true;
}

namespace detail {

template <typename Scalar>
Scalar magnitude(const Scalar& x) {
  using std::abs;
  return abs(x);
}

// Pivots on the least nonzero absolute value in the active block; remainders
// from division steps become the next pivot candidates.
template <typename Scalar, bool Track>
class SmithWorker {
 public:
  explicit SmithWorker(Matrix<Scalar> a) : d_(std::move(a)) {
    if constexpr (Track) {
      u_ = Matrix<Scalar>::Identity(d_.rows(), d_.rows());
      v_ = Matrix<Scalar>::Identity(d_.cols(), d_.cols());
    }
  }

  void run() {
    const Eigen::Index m = d_.rows();
    const Eigen::Index n = d_.cols();
    const Eigen::Index steps = std::min(m, n);
    for (Eigen::Index t = 0; t < steps; ++t) {
      if (!place_pivot(t)) break;
      for (;;) {
        bool clean = clear_column(t);
        clean = clear_row(t) && clean;
        if (!clean) {
          place_pivot(t);
          continue;
        }
        if (fix_divisibility(t)) continue;
        break;
      }
      if (d_(t, t) < Scalar(0)) negate_row(t);
      rank_ = t + 1;
    }
  }

  Matrix<Scalar>& d() { return d_; }
  Matrix<Scalar>& u() { return u_; }
  Matrix<Scalar>& v() { return v_; }
  Eigen::Index rank() const { return rank_; }

 private:
  bool place_pivot(Eigen::Index t) {
    Eigen::Index best_r = -1, best_c = -1;
    Scalar best{};
    for (Eigen::Index c = t; c < d_.cols(); ++c) {
      for (Eigen::Index r = t; r < d_.rows(); ++r) {
        if (d_(r, c) == Scalar(0)) continue;
        Scalar mag = magnitude(d_(r, c));
        if (best_r < 0 || mag < best) {
          best = mag;
          best_r = r;
          best_c = c;
          if (best == Scalar(1)) break;
        }
      }
      if (best_r >= 0 && best == Scalar(1)) break;
    }
    if (best_r < 0) return false;
    swap_rows(t, best_r);
    swap_cols(t, best_c);
    return true;
  }

  bool clear_column(Eigen::Index t) {
    bool clean = true;
    const Scalar pivot = d_(t, t);
    for (Eigen::Index r = t + 1; r < d_.rows(); ++r) {
      if (d_(r, t) == Scalar(0)) continue;
      Scalar q = d_(r, t) / pivot;
      if (q != Scalar(0)) add_row(r, t, -q);
      if (d_(r, t) != Scalar(0)) clean = false;
    }
    return clean;
  }

  bool clear_row(Eigen::Index t) {
    bool clean = true;
    const Scalar pivot = d_(t, t);
    for (Eigen::Index c = t + 1; c < d_.cols(); ++c) {
      if (d_(t, c) == Scalar(0)) continue;
      Scalar q = d_(t, c) / pivot;
      if (q != Scalar(0)) add_col(c, t, -q);
      if (d_(t, c) != Scalar(0)) clean = false;
    }
    return clean;
  }

  // Returns true if a row was folded into the pivot row.
  bool fix_divisibility(Eigen::Index t) {
    const Scalar pivot = d_(t, t);
    for (Eigen::Index r = t + 1; r < d_.rows(); ++r) {
      for (Eigen::Index c = t + 1; c < d_.cols(); ++c) {
        if (d_(r, c) % pivot != Scalar(0)) {
          add_row(t, r, Scalar(1));
          return true;
        }
      }
    }
    return false;
  }

  void swap_rows(Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    d_.row(a).swap(d_.row(b));
    if constexpr (Track) u_.row(a).swap(u_.row(b));
  }

  void swap_cols(Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    d_.col(a).swap(d_.col(b));
    if constexpr (Track) v_.col(a).swap(v_.col(b));
  }

  // row(dst) += k * row(src)
  void add_row(Eigen::Index dst, Eigen::Index src, const Scalar& k) {
    d_.row(dst) += k * d_.row(src);
    if constexpr (Track) u_.row(dst) += k * u_.row(src);
  }

  // col(dst) += k * col(src)
  void add_col(Eigen::Index dst, Eigen::Index src, const Scalar& k) {
    d_.col(dst) += k * d_.col(src);
    if constexpr (Track) v_.col(dst) += k * v_.col(src);
  }

  void negate_row(Eigen::Index t) {
    d_.row(t) = -d_.row(t);
    if constexpr (Track) u_.row(t) = -u_.row(t);
  }

  Matrix<Scalar> d_, u_, v_;
  Eigen::Index rank_ = 0;
};

}  // namespace detail

/// Smith normal form with transformation matrices, exact over `Scalar`.
template <typename Derived>
SmithDecomposition<typename Derived::Scalar> smith_normal_form(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  detail::SmithWorker<Scalar, true> worker(a.eval());
  worker.run();
  SmithDecomposition<Scalar> out;
  out.D = std::move(worker.d());
  out.U = std::move(worker.u());
  out.V = std::move(worker.v());
  out.rank = worker.rank();
  return out;
}

/// Nonzero invariant factors only; skips the transformation bookkeeping.
template <typename Derived>
std::vector<typename Derived::Scalar> invariant_factors(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  detail::SmithWorker<Scalar, false> worker(a.eval());
  worker.run();
  std::vector<Scalar> out;
  for (Eigen::Index i = 0; i < worker.rank(); ++i) out.push_back(worker.d()(i, i));
  return out;
}

/// Columns form a Z-basis of the integer kernel of `a`.
template <typename Derived>
Matrix<typename Derived::Scalar> integer_kernel(const Eigen::MatrixBase<Derived>& a) {
  auto snf = smith_normal_form(a);
  const Eigen::Index cols = a.cols();
  return snf.V.rightCols(cols - snf.rank);
}

/// Whether `b` lies in the Z-span of the columns of `a`.
template <typename DerivedA, typename DerivedB>
bool in_integer_span(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() == 0) return all_zero(b);
  auto snf = smith_normal_form(a);
  Matrix<Scalar> rhs = snf.U * b;
  for (Eigen::Index i = 0; i < rhs.rows(); ++i) {
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      if (i < snf.rank) {
        if (rhs(i, c) % snf.D(i, i) != Scalar(0)) return false;
      } else if (rhs(i, c) != Scalar(0)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace twocx
