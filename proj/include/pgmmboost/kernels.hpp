// Copyright 2026 The pgmmboost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "pgmmboost/types.hpp"

namespace pgmmboost {

enum class KernelKind { Linear, Rbf, Gmm, Pgmm };

/// Tagged kernel choice. `gamma` is consumed by the RBF kernel only and `p`
/// by the powered min-max kernel only.
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double gamma = 1.0;
  double p = 1.0;

  static KernelSpec linear() { return {KernelKind::Linear, 1.0, 1.0}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::Rbf, gamma, 1.0}; }
  static KernelSpec gmm() { return {KernelKind::Gmm, 1.0, 1.0}; }
  static KernelSpec pgmm(double p) { return {KernelKind::Pgmm, 1.0, p}; }

  void validate() const {
    if (kind == KernelKind::Rbf && !(gamma > 0.0))
      throw std::invalid_argument("rbf kernel requires gamma > 0");
    if (kind == KernelKind::Pgmm && !(p > 0.0))
      throw std::invalid_argument("pgmm kernel requires p > 0");
  }

  std::string name() const {
    switch (kind) {
      case KernelKind::Linear: return "linear";
      case KernelKind::Rbf: return "rbf";
      case KernelKind::Gmm: return "gmm";
      case KernelKind::Pgmm: return "pgmm";
    }
    return "?";
  }
};

namespace detail {

inline void check_same_dims(Index a, Index b) {
  if (a != b) {
    throw std::invalid_argument("kernel argument dimension mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

// x^p for x >= 0, with 0 contributing 0 regardless of p.
inline double pow_nonneg(double x, double p) {
  return x > 0.0 ? std::pow(x, p) : 0.0;
}

// Ratio of summed elementwise minima to summed elementwise maxima over two
// nonnegative vectors; an all-zero pair returns 0 by convention.
template <typename DA, typename DB>
double minmax_ratio(const Eigen::MatrixBase<DA>& a,
                    const Eigen::MatrixBase<DB>& b) {
  double min_sum = 0.0, max_sum = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double x = a(i), y = b(i);
    if (x < y) {
      min_sum += x;
      max_sum += y;
    } else {
      min_sum += y;
      max_sum += x;
    }
  }
  return max_sum > 0.0 ? min_sum / max_sum : 0.0;
}

}  // namespace detail

/// Doubles the dimension so every entry is nonnegative: coordinate i becomes
/// the pair (positive part, negative part), i.e. u_i > 0 yields (u_i, 0) and
/// u_i <= 0 yields (0, -u_i). At most one entry of each pair is nonzero.
template <typename Derived>
VectorX<typename Derived::Scalar> transform_nonnegative(
    const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  VectorX<Scalar> out = VectorX<Scalar>::Zero(2 * u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const Scalar x = u(i);
    if (x > Scalar(0)) {
      out(2 * i) = x;
    } else {
      out(2 * i + 1) = -x;
    }
  }
  return out;
}

/// Row-wise nonnegativity transform: m x d in, m x 2d out. When `power` is
/// not 1 each transformed entry is additionally raised to that power, which
/// is the cached per-row form used to evaluate the powered min-max kernel.
template <typename Derived>
MatrixX<typename Derived::Scalar> transform_nonnegative_rows(
    const Eigen::MatrixBase<Derived>& X, double power = 1.0) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(X.rows(), 2 * X.cols());
  for (Index r = 0; r < X.rows(); ++r) {
    for (Index j = 0; j < X.cols(); ++j) {
      const Scalar x = X(r, j);
      Scalar t = x > Scalar(0) ? x : -x;
      if (power != 1.0) t = static_cast<Scalar>(detail::pow_nonneg(t, power));
      out(r, x > Scalar(0) ? 2 * j : 2 * j + 1) = t;
    }
  }
  return out;
}

/// Generalized min-max similarity of two general real vectors; always in
/// [0, 1], and exactly 1 for identical nonzero inputs.
template <typename DA, typename DB>
double gmm(const Eigen::MatrixBase<DA>& u, const Eigen::MatrixBase<DB>& v) {
  detail::check_same_dims(u.size(), v.size());
  return detail::minmax_ratio(transform_nonnegative(u),
                              transform_nonnegative(v));
}

/// Powered min-max similarity: min-max ratio on the p-th powers of the
/// transformed entries. p = 1 recovers gmm exactly.
template <typename DA, typename DB>
double pgmm(const Eigen::MatrixBase<DA>& u, const Eigen::MatrixBase<DB>& v,
            double p) {
  detail::check_same_dims(u.size(), v.size());
  if (!(p > 0.0)) throw std::invalid_argument("pgmm requires p > 0");
  if (p == 1.0) return gmm(u, v);
  VectorX<double> tu = transform_nonnegative(u).template cast<double>();
  VectorX<double> tv = transform_nonnegative(v).template cast<double>();
  for (Index i = 0; i < tu.size(); ++i) tu(i) = detail::pow_nonneg(tu(i), p);
  for (Index i = 0; i < tv.size(); ++i) tv(i) = detail::pow_nonneg(tv(i), p);
  return detail::minmax_ratio(tu, tv);
}

/// Gaussian similarity exp(-gamma * ||u - v||^2), in (0, 1].
template <typename DA, typename DB>
double rbf(const Eigen::MatrixBase<DA>& u, const Eigen::MatrixBase<DB>& v,
           double gamma) {
  detail::check_same_dims(u.size(), v.size());
  if (!(gamma > 0.0)) throw std::invalid_argument("rbf requires gamma > 0");
  const double sq = (u.derived().template cast<double>() -
                     v.derived().template cast<double>())
                        .squaredNorm();
  return std::exp(-gamma * sq);
}

/// Dense kernel matrix with entry (i, j) = k(A_i, B_j). For the min-max
/// kernels the per-row transforms (including the p-th powers) are computed
/// once and reused across entries. When A and B alias the same data the
/// upper triangle is mirrored, so the result is exactly symmetric.
template <typename DA, typename DB>
Matrix kernel_matrix(const Eigen::MatrixBase<DA>& A,
                     const Eigen::MatrixBase<DB>& B, const KernelSpec& spec) {
  detail::check_same_dims(A.cols(), B.cols());
  spec.validate();
  const Index m = A.rows(), n = B.rows();
  const bool aliased = static_cast<const void*>(A.derived().data()) ==
                           static_cast<const void*>(B.derived().data()) &&
                       m == n;

  switch (spec.kind) {
    case KernelKind::Linear:
      return A.derived().template cast<double>() *
             B.derived().template cast<double>().transpose();

    case KernelKind::Rbf: {
      Matrix K(m, n);
      const Matrix Ad = A.derived().template cast<double>();
      const Matrix Bd = B.derived().template cast<double>();
      for (Index i = 0; i < m; ++i) {
        const Index j0 = aliased ? i : 0;
        for (Index j = j0; j < n; ++j) {
          const double sq = (Ad.row(i) - Bd.row(j)).squaredNorm();
          K(i, j) = std::exp(-spec.gamma * sq);
          if (aliased) K(j, i) = K(i, j);
        }
      }
      return K;
    }

    case KernelKind::Gmm:
    case KernelKind::Pgmm: {
      const double power = spec.kind == KernelKind::Pgmm ? spec.p : 1.0;
      const Matrix TA = transform_nonnegative_rows(A, power);
      const Matrix TB =
          aliased ? Matrix() : transform_nonnegative_rows(B, power);
      const Matrix& TBr = aliased ? TA : TB;
      Matrix K(m, n);
      for (Index i = 0; i < m; ++i) {
        const Index j0 = aliased ? i : 0;
        for (Index j = j0; j < n; ++j) {
          K(i, j) = detail::minmax_ratio(TA.row(i), TBr.row(j));
          if (aliased) K(j, i) = K(i, j);
        }
      }
      return K;
    }
  }
  throw std::logic_error("unreachable kernel kind");
}

}  // namespace pgmmboost
