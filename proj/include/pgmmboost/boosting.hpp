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
#include <vector>

#include "pgmmboost/binning.hpp"
#include "pgmmboost/tree.hpp"
#include "pgmmboost/types.hpp"

namespace pgmmboost {

/// Mean p-th power loss (1/n) sum |y_i - F_i|^p, p >= 1.
inline double lp_loss(const Vector& y, const Vector& F, double p) {
  if (y.size() != F.size())
    throw std::invalid_argument("lp_loss: length mismatch");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_loss: p must be >= 1");
  const Index n = y.size();
  double sum = 0.0;
  if (p == 2.0) {
    for (Index i = 0; i < n; ++i) {
      const double r = y[i] - F[i];
      sum += r * r;
    }
  } else if (p == 1.0) {
    for (Index i = 0; i < n; ++i) sum += std::abs(y[i] - F[i]);
  } else {
    for (Index i = 0; i < n; ++i) sum += std::pow(std::abs(y[i] - F[i]), p);
  }
  return sum / static_cast<double>(n);
}

/// First derivative of |y - F|^p with respect to F:
/// -p |y - F|^{p-1} sign(y - F), with sign(0) = 0 so a zero residual
/// contributes no gradient for any p >= 1.
inline double lp_grad(double y, double F, double p) {
  const double r = y - F;
  if (r == 0.0) return 0.0;
  if (p == 2.0) return -2.0 * r;
  const double mag = p * std::pow(std::abs(r), p - 1.0);
  return r > 0.0 ? -mag : mag;
}

/// Second derivative p (p-1) |y - F|^{p-2}; defined for p >= 2 only, and
/// exactly 2 at p = 2 regardless of the residual.
inline double lp_hess(double y, double F, double p) {
  if (!(p >= 2.0))
    throw std::logic_error("lp_hess: second derivative requires p >= 2");
  if (p == 2.0) return 2.0;
  const double r = std::abs(y - F);
  if (r == 0.0) return 0.0;
  return p * (p - 1.0) * std::pow(r, p - 2.0);
}

/// Conservative training-loss exit level: epsilon^{p/2} * (1/n) sum |y_i|^p.
inline double early_stop_threshold(const Vector& y, double p, double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("early_stop_threshold: epsilon must be > 0");
  const Index n = y.size();
  if (n < 1) throw std::invalid_argument("early_stop_threshold: empty targets");
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) sum += std::pow(std::abs(y[i]), p);
  return std::pow(epsilon, p / 2.0) * sum / static_cast<double>(n);
}

struct BoostOptions {
  double p = 2.0;            // loss power, >= 1
  int num_leaves = 10;       // terminal nodes per tree (J)
  double shrinkage = 0.1;    // nu in (0, 1]
  int max_iterations = 10000;
  double epsilon = 1e-5;     // early-stop scale
  int min_leaf = 1;
  int max_bins = 255;
};

/// Stagewise additive tree model. Prediction is the shrinkage-scaled sum of
/// tree outputs over rows binned with the stored binner.
struct BoostModel {
  std::vector<RegressionTree> trees;
  Binner binner;
  double shrinkage = 0.1;
  double p = 2.0;
  int iterations_run = 0;
  std::vector<double> train_lp_history;   // training loss in the fitted power
  std::vector<double> train_mse_history;  // squared loss, reported for any p
  std::vector<double> eval_mse_history;   // squared loss on the eval set
};

inline Vector predict_boost(const BoostModel& model, const Matrix& Xt) {
  if (model.trees.empty()) return Vector::Zero(Xt.rows());
  const CodeMatrix codes = apply_bins(Xt, model.binner);
  Vector F = Vector::Zero(Xt.rows());
  for (const RegressionTree& tree : model.trees) {
    for (Index i = 0; i < codes.rows(); ++i) {
      F[i] += model.shrinkage * tree.predict(codes.row(i));
    }
  }
  return F;
}

/// Fits the additive model: starting from F = 0, each iteration grows one
/// tree on the current loss derivatives and updates F by `shrinkage` times
/// the tree output. For p >= 2 trees use the second-order gain and leaf
/// values -sum(L')/sum(L''); for 1 <= p < 2 no second derivative exists, so
/// the unit-weight gain applies with leaf values -sum(L')/(p * count).
/// Fitting exits early once the training loss drops below
/// early_stop_threshold(y, p, epsilon). Passing an eval set records its
/// squared loss after every iteration.
inline BoostModel fit_lp_boost(const Matrix& X, const Vector& y,
                               const BoostOptions& opt,
                               const Matrix* X_eval = nullptr,
                               const Vector* y_eval = nullptr) {
  if (X.rows() != y.size())
    throw std::invalid_argument("fit_lp_boost: row/target mismatch");
  if (!(opt.p >= 1.0))
    throw std::invalid_argument("fit_lp_boost: p must be >= 1");
  if (!(opt.shrinkage > 0.0 && opt.shrinkage <= 1.0))
    throw std::invalid_argument("fit_lp_boost: shrinkage must be in (0, 1]");
  if (opt.num_leaves < 2)
    throw std::invalid_argument("fit_lp_boost: num_leaves must be >= 2");
  if (opt.max_iterations < 1)
    throw std::invalid_argument("fit_lp_boost: max_iterations must be >= 1");
  if ((X_eval == nullptr) != (y_eval == nullptr))
    throw std::invalid_argument("fit_lp_boost: eval features and targets must come together");
  if (X_eval && X_eval->rows() != y_eval->size())
    throw std::invalid_argument("fit_lp_boost: eval row/target mismatch");

  const Index n = X.rows();
  const bool second_order = opt.p >= 2.0;

  BoostModel model;
  model.shrinkage = opt.shrinkage;
  model.p = opt.p;
  model.binner = build_bins(X, opt.max_bins);
  const CodeMatrix codes = apply_bins(X, model.binner);
  CodeMatrix eval_codes;
  if (X_eval) eval_codes = apply_bins(*X_eval, model.binner);

  const double stop_level = early_stop_threshold(y, opt.p, opt.epsilon);
  TreeOptions tree_opt;
  tree_opt.max_leaves = opt.num_leaves;
  tree_opt.min_leaf = opt.min_leaf;
  tree_opt.loss_power = opt.p;

  Vector F = Vector::Zero(n);
  Vector F_eval;
  if (X_eval) F_eval = Vector::Zero(X_eval->rows());
  Vector grad(n), hess;
  if (second_order) hess.resize(n);

  for (int m = 1; m <= opt.max_iterations; ++m) {
    for (Index i = 0; i < n; ++i) {
      grad[i] = lp_grad(y[i], F[i], opt.p);
      if (second_order) hess[i] = lp_hess(y[i], F[i], opt.p);
    }
    RegressionTree tree =
        grow_tree(codes, grad, second_order ? &hess : nullptr, tree_opt);

    for (Index i = 0; i < n; ++i) {
      F[i] += opt.shrinkage * tree.predict(codes.row(i));
    }
    if (X_eval) {
      for (Index i = 0; i < eval_codes.rows(); ++i) {
        F_eval[i] += opt.shrinkage * tree.predict(eval_codes.row(i));
      }
    }
    model.trees.push_back(std::move(tree));
    model.iterations_run = m;

    const double loss = lp_loss(y, F, opt.p);
    model.train_lp_history.push_back(loss);
    model.train_mse_history.push_back(opt.p == 2.0 ? loss : lp_loss(y, F, 2.0));
    if (X_eval) model.eval_mse_history.push_back(lp_loss(*y_eval, F_eval, 2.0));

    if (loss < stop_level) break;
  }
  return model;
}

}  // namespace pgmmboost
