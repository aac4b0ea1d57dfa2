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

#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "pgmmboost/kernels.hpp"
#include "pgmmboost/types.hpp"

namespace pgmmboost {

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagnostics from solve_spd. `jitter` is the diagonal shift that made the
/// factorization succeed (0 when none was needed).
struct SpdSolveInfo {
  int attempts = 1;
  double jitter = 0.0;
  double rel_residual = 0.0;
};

/// Solves A x = b for symmetric positive definite A by Cholesky
/// factorization. If the factorization reports a numerical issue, a diagonal
/// jitter of 1e-10 * trace(A)/n is added and grown tenfold per retry, up to
/// six retries, after which NotPositiveDefinite is thrown. One step of
/// iterative refinement keeps the relative residual near machine precision
/// for well-conditioned systems.
inline Vector solve_spd(const Matrix& A, const Vector& b,
                        SpdSolveInfo* info = nullptr) {
  const Index n = A.rows();
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("solve_spd: shape mismatch");

  double base = 1e-10 * A.trace() / static_cast<double>(n);
  if (!(base > 0.0)) base = 1e-10;
  const double b_norm = b.norm();

  double jitter = 0.0;
  constexpr int kMaxRetries = 6;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    Matrix M = A;
    if (jitter > 0.0) M.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() == Eigen::Success) {
      Vector x = llt.solve(b);
      double res = (M * x - b).norm();
      if (b_norm > 0.0 && res / b_norm > 1e-13) {
        x += llt.solve(b - M * x);
        res = (M * x - b).norm();
      }
      if (info) {
        info->attempts = attempt + 1;
        info->jitter = jitter;
        info->rel_residual = b_norm > 0.0 ? res / b_norm : res;
      }
      return x;
    }
    jitter = jitter == 0.0 ? base : jitter * 10.0;
  }
  throw NotPositiveDefinite(
      "solve_spd: Cholesky failed after jitter escalation (final jitter " +
      format_double(jitter) + ")");
}

/// Primal ridge model: weights solve (X^T X + lambda I) w = X^T y on the
/// intercept-augmented feature matrix when `has_intercept` is set. The
/// intercept coordinate is regularized like any other weight.
struct LinearRidgeModel {
  Vector weights;
  double lambda = 0.0;
  bool has_intercept = false;
  SpdSolveInfo solve_info;

  Index feature_dims() const {
    return weights.size() - (has_intercept ? 1 : 0);
  }
};

namespace detail {

inline Matrix append_ones_column(const Matrix& X) {
  Matrix Xa(X.rows(), X.cols() + 1);
  Xa.leftCols(X.cols()) = X;
  Xa.col(X.cols()).setOnes();
  return Xa;
}

}  // namespace detail

inline LinearRidgeModel fit_linear_ridge(const Matrix& X, const Vector& y,
                                         double lambda,
                                         bool intercept = false) {
  if (X.rows() != y.size())
    throw std::invalid_argument("fit_linear_ridge: row/target mismatch");
  if (lambda < 0.0)
    throw std::invalid_argument("fit_linear_ridge: lambda must be >= 0");
  const Matrix Xa = intercept ? detail::append_ones_column(X) : X;
  Matrix A = Xa.transpose() * Xa;
  A.diagonal().array() += lambda;
  LinearRidgeModel model;
  model.lambda = lambda;
  model.has_intercept = intercept;
  model.weights = solve_spd(A, Xa.transpose() * y, &model.solve_info);
  return model;
}

inline Vector predict_linear(const LinearRidgeModel& model, const Matrix& Xt) {
  if (Xt.cols() != model.feature_dims()) {
    throw std::invalid_argument("predict_linear: expected " +
                                std::to_string(model.feature_dims()) +
                                " features, got " + std::to_string(Xt.cols()));
  }
  Vector yhat = Xt * model.weights.head(model.feature_dims());
  if (model.has_intercept) yhat.array() += model.weights[model.weights.size() - 1];
  return yhat;
}

/// Dual (kernel) ridge model: alpha solves (K + lambda I) alpha = y over the
/// retained training rows; prediction is K_t * alpha.
struct KernelRidgeModel {
  Vector alpha;
  double lambda = 0.0;
  KernelSpec spec;
  Matrix train_features;
  SpdSolveInfo solve_info;
};

/// Variant taking a precomputed training kernel matrix so a lambda sweep can
/// reuse the (dominant-cost) kernel build.
inline KernelRidgeModel fit_kernel_ridge_precomputed(const Matrix& K,
                                                     const Matrix& X,
                                                     const Vector& y,
                                                     double lambda,
                                                     const KernelSpec& spec) {
  if (K.rows() != K.cols() || K.rows() != y.size() || X.rows() != y.size())
    throw std::invalid_argument("fit_kernel_ridge: shape mismatch");
  if (lambda < 0.0)
    throw std::invalid_argument("fit_kernel_ridge: lambda must be >= 0");
  spec.validate();
  Matrix A = K;
  A.diagonal().array() += lambda;
  KernelRidgeModel model;
  model.lambda = lambda;
  model.spec = spec;
  model.train_features = X;
  model.alpha = solve_spd(A, y, &model.solve_info);
  return model;
}

inline KernelRidgeModel fit_kernel_ridge(const Matrix& X, const Vector& y,
                                         double lambda,
                                         const KernelSpec& spec) {
  return fit_kernel_ridge_precomputed(kernel_matrix(X, X, spec), X, y, lambda,
                                      spec);
}

inline Vector predict_kernel_ridge_precomputed(const KernelRidgeModel& model,
                                               const Matrix& Kt) {
  if (Kt.cols() != model.alpha.size())
    throw std::invalid_argument("predict_kernel_ridge: kernel width mismatch");
  return Kt * model.alpha;
}

inline Vector predict_kernel_ridge(const KernelRidgeModel& model,
                                   const Matrix& Xt) {
  if (Xt.cols() != model.train_features.cols()) {
    throw std::invalid_argument(
        "predict_kernel_ridge: expected " +
        std::to_string(model.train_features.cols()) + " features, got " +
        std::to_string(Xt.cols()));
  }
  return predict_kernel_ridge_precomputed(
      model, kernel_matrix(Xt, model.train_features, model.spec));
}

}  // namespace pgmmboost
