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

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pgmmboost/types.hpp"

namespace pgmmboost {

// Floor applied to hessian-sum denominators in gains and leaf values; with
// loss powers slightly above 2 and zero residuals the hessian sum is exactly
// zero, so the unguarded division is reachable.
constexpr double kHessianFloor = 1e-12;

// Gains at or below 1e-10 relative to the parent score are treated as zero;
// a node whose responses are already homogeneous must not split on rounding
// residue.
constexpr double kMinGainRel = 1e-10;

namespace detail {

inline double floored(double h) { return h < kHessianFloor ? kHessianFloor : h; }

}  // namespace detail

/// Split score from first/second derivative sums: with G/H the node totals
/// and G_l/H_l the sums over the candidate left side,
///   G_l^2/H_l + (G - G_l)^2/(H - H_l) - G^2/H.
/// Denominators are floored at kHessianFloor.
inline double gain_second_order(double g_left, double h_left, double g_total,
                                double h_total) {
  const double g_right = g_total - g_left;
  const double h_right = h_total - h_left;
  return g_left * g_left / detail::floored(h_left) +
         g_right * g_right / detail::floored(h_right) -
         g_total * g_total / detail::floored(h_total);
}

/// Unit-weight split score used when second derivatives do not exist:
/// counts replace the hessian sums.
inline double gain_first_order(double g_left, Index count_left, double g_total,
                               Index count_total) {
  if (count_left < 1 || count_left >= count_total)
    throw std::invalid_argument("gain_first_order: count_left out of range");
  const double g_right = g_total - g_left;
  return g_left * g_left / static_cast<double>(count_left) +
         g_right * g_right / static_cast<double>(count_total - count_left) -
         g_total * g_total / static_cast<double>(count_total);
}

/// Binary regression tree over binned feature codes. Internal nodes route a
/// row left when row[feature] <= threshold; leaves carry the fitted value.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  int threshold = -1;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int leaf_count = 0;

  template <typename RowLike>
  int leaf_index(const RowLike& row) const {
    int id = 0;
    while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
      const TreeNode& nd = nodes[static_cast<std::size_t>(id)];
      id = row(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return id;
  }

  template <typename RowLike>
  double predict(const RowLike& row) const {
    return nodes[static_cast<std::size_t>(leaf_index(row))].value;
  }
};

template <typename RowLike>
double predict_tree(const RegressionTree& tree, const RowLike& row) {
  return tree.predict(row);
}

struct TreeOptions {
  int max_leaves = 10;      // terminal-node budget J
  int min_leaf = 1;         // minimum samples on each side of a split
  double loss_power = 2.0;  // leaf denominator p * count in first-order mode
};

namespace detail {

struct SplitChoice {
  bool valid = false;
  double gain = 0.0;
  int feature = -1;
  int threshold = -1;
  double g_left = 0.0;
  double h_left = 0.0;
  Index count_left = 0;
};

struct BuildNode {
  std::vector<int> samples;
  double g_sum = 0.0;
  double h_sum = 0.0;  // count in first-order mode is samples.size()
  int tree_node = -1;
  SplitChoice best;
};

// Scans each feature's occupied bins in code order, accumulating prefix
// sums; candidate thresholds sit at occupied bins with both sides holding at
// least min_leaf samples. Equal gains resolve to the lowest feature index,
// then the lowest threshold.
inline SplitChoice find_best_split(const CodeMatrix& codes, const Vector& grad,
                                   const Vector* hess,
                                   const std::vector<int>& bins_per_feature,
                                   const BuildNode& node, int min_leaf) {
  SplitChoice best;
  const Index count = static_cast<Index>(node.samples.size());
  const int num_features = static_cast<int>(codes.cols());
  std::vector<double> hist_g, hist_h;
  std::vector<Index> hist_c;
  for (int f = 0; f < num_features; ++f) {
    const int nbins = bins_per_feature[static_cast<std::size_t>(f)];
    if (nbins < 2) continue;
    hist_g.assign(static_cast<std::size_t>(nbins), 0.0);
    hist_c.assign(static_cast<std::size_t>(nbins), 0);
    if (hess) hist_h.assign(static_cast<std::size_t>(nbins), 0.0);
    for (int idx : node.samples) {
      const auto c = static_cast<std::size_t>(codes(idx, f));
      hist_g[c] += grad[idx];
      hist_c[c] += 1;
      if (hess) hist_h[c] += (*hess)[idx];
    }
    double cg = 0.0, ch = 0.0;
    Index cc = 0;
    for (int c = 0; c + 1 < nbins; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      cg += hist_g[cu];
      cc += hist_c[cu];
      if (hess) ch += hist_h[cu];
      if (hist_c[cu] == 0) continue;  // same partition as the previous threshold
      if (cc < min_leaf || count - cc < min_leaf) continue;
      const double gain = hess ? gain_second_order(cg, ch, node.g_sum, node.h_sum)
                               : gain_first_order(cg, cc, node.g_sum, count);
      if (!best.valid || gain > best.gain) {
        best.valid = true;
        best.gain = gain;
        best.feature = f;
        best.threshold = c;
        best.g_left = cg;
        best.h_left = ch;
        best.count_left = cc;
      }
    }
  }
  return best;
}

}  // namespace detail

/// Grows a weighted regression tree by best-first expansion: the leaf whose
/// best (feature, threshold) pair has the largest gain is split until
/// `max_leaves` leaves exist or no remaining split has positive gain. `grad`
/// holds the per-sample first derivatives; when `hess` is present splits use
/// the second-order gain and leaf values are -sum(grad)/sum(hess), otherwise
/// the unit-weight gain applies and leaf values are
/// -sum(grad)/(loss_power * count).
inline RegressionTree grow_tree(const CodeMatrix& codes, const Vector& grad,
                                const Vector* hess, const TreeOptions& opt) {
  const Index n = codes.rows();
  if (opt.max_leaves < 2)
    throw std::invalid_argument("grow_tree: max_leaves must be >= 2");
  if (opt.min_leaf < 1)
    throw std::invalid_argument("grow_tree: min_leaf must be >= 1");
  if (grad.size() != n)
    throw std::invalid_argument("grow_tree: gradient length mismatch");
  if (hess && hess->size() != n)
    throw std::invalid_argument("grow_tree: hessian length mismatch");
  if (!hess && !(opt.loss_power > 0.0))
    throw std::invalid_argument("grow_tree: loss_power must be > 0");
  if (n < 1) throw std::invalid_argument("grow_tree: empty node");

  std::vector<int> bins_per_feature(static_cast<std::size_t>(codes.cols()));
  for (Index f = 0; f < codes.cols(); ++f) {
    bins_per_feature[static_cast<std::size_t>(f)] = codes.col(f).maxCoeff() + 1;
  }

  const auto leaf_value = [&](double g_sum, double h_sum, Index count) {
    return hess ? -g_sum / detail::floored(h_sum)
                : -g_sum / (opt.loss_power * static_cast<double>(count));
  };
  const auto acceptable = [&](const detail::BuildNode& nb) {
    if (!nb.best.valid) return false;
    const double parent =
        hess ? nb.g_sum * nb.g_sum / detail::floored(nb.h_sum)
             : nb.g_sum * nb.g_sum / static_cast<double>(nb.samples.size());
    return nb.best.gain > kMinGainRel * std::max(1.0, parent);
  };

  std::vector<detail::BuildNode> build;
  RegressionTree tree;

  detail::BuildNode root;
  root.samples.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) root.samples[static_cast<std::size_t>(i)] = static_cast<int>(i);
  root.g_sum = grad.sum();
  root.h_sum = hess ? hess->sum() : static_cast<double>(n);
  root.tree_node = 0;
  root.best = detail::find_best_split(codes, grad, hess, bins_per_feature,
                                      root, opt.min_leaf);
  TreeNode root_leaf;
  root_leaf.value = leaf_value(root.g_sum, root.h_sum, n);
  tree.nodes.push_back(root_leaf);
  tree.leaf_count = 1;

  // Max-gain priority; ties go to the older node so growth is deterministic.
  using Entry = std::pair<double, int>;
  const auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  build.push_back(std::move(root));
  if (acceptable(build[0])) queue.emplace(build[0].best.gain, 0);

  while (tree.leaf_count < opt.max_leaves && !queue.empty()) {
    const int id = queue.top().second;
    queue.pop();

    const detail::SplitChoice choice = build[static_cast<std::size_t>(id)].best;
    detail::BuildNode left, right;
    left.samples.reserve(static_cast<std::size_t>(choice.count_left));
    right.samples.reserve(build[static_cast<std::size_t>(id)].samples.size() -
                          static_cast<std::size_t>(choice.count_left));
    for (int idx : build[static_cast<std::size_t>(id)].samples) {
      if (codes(idx, choice.feature) <= choice.threshold) {
        left.samples.push_back(idx);
      } else {
        right.samples.push_back(idx);
      }
    }
    for (auto* child : {&left, &right}) {
      child->g_sum = 0.0;
      child->h_sum = 0.0;
      for (int idx : child->samples) {
        child->g_sum += grad[idx];
        if (hess) child->h_sum += (*hess)[idx];
      }
      if (!hess) child->h_sum = static_cast<double>(child->samples.size());
    }

    const int left_tree = static_cast<int>(tree.nodes.size());
    const int right_tree = left_tree + 1;
    TreeNode left_leaf, right_leaf;
    left_leaf.value = leaf_value(left.g_sum, left.h_sum,
                                 static_cast<Index>(left.samples.size()));
    right_leaf.value = leaf_value(right.g_sum, right.h_sum,
                                  static_cast<Index>(right.samples.size()));
    tree.nodes.push_back(left_leaf);
    tree.nodes.push_back(right_leaf);

    TreeNode& parent = tree.nodes[static_cast<std::size_t>(
        build[static_cast<std::size_t>(id)].tree_node)];
    parent.feature = choice.feature;
    parent.threshold = choice.threshold;
    parent.left = left_tree;
    parent.right = right_tree;
    tree.leaf_count += 1;

    left.tree_node = left_tree;
    right.tree_node = right_tree;
    build[static_cast<std::size_t>(id)].samples.clear();
    build[static_cast<std::size_t>(id)].samples.shrink_to_fit();

    if (tree.leaf_count < opt.max_leaves) {
      for (auto* child : {&left, &right}) {
        child->best = detail::find_best_split(codes, grad, hess,
                                              bins_per_feature, *child,
                                              opt.min_leaf);
      }
    }
    const int left_id = static_cast<int>(build.size());
    build.push_back(std::move(left));
    build.push_back(std::move(right));
    if (acceptable(build[static_cast<std::size_t>(left_id)]))
      queue.emplace(build[static_cast<std::size_t>(left_id)].best.gain, left_id);
    if (acceptable(build[static_cast<std::size_t>(left_id) + 1]))
      queue.emplace(build[static_cast<std::size_t>(left_id) + 1].best.gain,
                    left_id + 1);
  }
  return tree;
}

}  // namespace pgmmboost
