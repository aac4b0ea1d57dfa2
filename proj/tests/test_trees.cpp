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

#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "pgmmboost/binning.hpp"
#include "pgmmboost/tree.hpp"

using namespace pgmmboost;

TEST_CASE("build_bins gives exact codes to low-cardinality features") {
  Matrix X(6, 1);
  X << 0, 1, 1, 0, 1, 0;
  Binner binner = build_bins(X, 255);
  CHECK(binner.bins(0) == 2);
  CodeMatrix codes = apply_bins(X, binner);
  for (Index i = 0; i < X.rows(); ++i) {
    CHECK(codes(i, 0) == static_cast<int>(X(i, 0)));
  }
}

TEST_CASE("build_bins quantizes high-cardinality features at equal ranks") {
  const Index n = 1000;
  Matrix X(n, 1);
  auto gen = oracles::rng(50);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (Index i = 0; i < n; ++i) X(i, 0) = dist(gen);
  Binner binner = build_bins(X, 10);
  REQUIRE(binner.bins(0) == 10);
  CodeMatrix codes = apply_bins(X, binner);
  std::vector<int> counts(10, 0);
  for (Index i = 0; i < n; ++i) counts[static_cast<std::size_t>(codes(i, 0))]++;
  for (int c : counts) CHECK(c == 100);
}

TEST_CASE("build_bins collapses constant features to one bin") {
  Matrix X = Matrix::Constant(5, 1, 3.3);
  Binner binner = build_bins(X, 255);
  CHECK(binner.bins(0) == 1);
  CodeMatrix codes = apply_bins(X, binner);
  for (Index i = 0; i < 5; ++i) CHECK(codes(i, 0) == 0);
  CHECK_THROWS_AS(build_bins(X, 1), std::invalid_argument);
}

TEST_CASE("apply_bins maps to the first boundary >= value, clamped") {
  Binner binner;
  binner.boundaries = {{0.5, 1.5}};
  Matrix X(3, 1);
  X << 0.2, 0.9, 99.0;
  CodeMatrix codes = apply_bins(X, binner);
  CHECK(codes(0, 0) == 0);
  CHECK(codes(1, 0) == 1);
  CHECK(codes(2, 0) == 1);

  Matrix wrong(1, 2);
  CHECK_THROWS_AS(apply_bins(wrong, binner), std::invalid_argument);
}

TEST_CASE("binner invariants on random data") {
  auto gen = oracles::rng(51);
  Matrix X = oracles::random_matrix(gen, 300, 4, -5.0, 5.0);
  X.col(2) = (X.col(2) * 3.0).array().round();  // duplicate-heavy column
  Binner binner = build_bins(X, 16);
  for (Index j = 0; j < X.cols(); ++j) {
    const auto& bounds = binner.boundaries[static_cast<std::size_t>(j)];
    REQUIRE(!bounds.empty());
    CHECK(bounds.size() <= 16);
    for (std::size_t k = 1; k < bounds.size(); ++k) {
      CHECK(bounds[k] > bounds[k - 1]);
    }
  }
  // Monotone map: x <= y implies code(x) <= code(y).
  std::uniform_real_distribution<double> dist(-6.0, 6.0);
  for (int it = 0; it < 500; ++it) {
    double a = dist(gen), b = dist(gen);
    if (a > b) std::swap(a, b);
    for (Index j = 0; j < X.cols(); ++j) {
      const auto& bounds = binner.boundaries[static_cast<std::size_t>(j)];
      CHECK(bin_code(bounds, a) <= bin_code(bounds, b));
    }
  }
}

TEST_CASE("codes are invariant under strictly increasing transforms") {
  auto gen = oracles::rng(52);
  Matrix X = oracles::random_matrix(gen, 400, 3, -2.0, 2.0);
  Binner binner = build_bins(X, 12);
  CodeMatrix codes = apply_bins(X, binner);

  Matrix Xt = X;
  Xt.col(0) = X.col(0).array().cube();
  Xt.col(1) = X.col(1).array().exp();
  Xt.col(2) = X.col(2).array().tanh();
  Binner binner_t = build_bins(Xt, 12);
  CodeMatrix codes_t = apply_bins(Xt, binner_t);
  CHECK((codes.array() == codes_t.array()).all());
}

TEST_CASE("gain_second_order hand values") {
  // Two samples, derivatives (-1, +1), unit curvatures, split after the first.
  CHECK(gain_second_order(-1.0, 1.0, 0.0, 2.0) == 2.0);
  // All-zero derivatives give zero gain at every split.
  CHECK(gain_second_order(0.0, 1.0, 0.0, 3.0) == 0.0);
  // Floored denominators keep the value finite.
  CHECK(std::isfinite(gain_second_order(1.0, 0.0, 2.0, 0.0)));
}

TEST_CASE("gain_first_order hand values and unit-weight reduction") {
  CHECK(gain_first_order(-1.0, 1, 0.0, 2) == 2.0);
  // Homogeneous derivatives: zero gain (exact for integer-valued inputs).
  CHECK(gain_first_order(3.0, 3, 10.0, 10) == 0.0);
  CHECK_THROWS_AS(gain_first_order(1.0, 0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(gain_first_order(1.0, 5, 1.0, 5), std::invalid_argument);

  auto gen = oracles::rng(53);
  for (int it = 0; it < 200; ++it) {
    const Index n = 2 + static_cast<Index>(gen() % 20);
    const Index s = 1 + static_cast<Index>(gen() % (n - 1));
    Vector g = oracles::random_vector(gen, n);
    double g_left = g.head(s).sum();
    CHECK(gain_first_order(g_left, s, g.sum(), n) ==
          gain_second_order(g_left, static_cast<double>(s), g.sum(),
                            static_cast<double>(n)));
  }
}

TEST_CASE("gain_second_order equals the direct weighted-SE reduction") {
  auto gen = oracles::rng(54);
  std::uniform_real_distribution<double> gd(-3.0, 3.0);
  std::uniform_real_distribution<double> hd(0.1, 4.0);
  for (int it = 0; it < 1000; ++it) {
    const std::size_t n = 2 + gen() % 49;
    std::vector<double> g(n), h(n);
    for (auto& v : g) v = gd(gen);
    for (auto& v : h) v = hd(gen);
    const std::size_t s = 1 + gen() % (n - 1);
    std::vector<bool> left(n);
    double gl = 0.0, hl = 0.0, gt = 0.0, ht = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      left[i] = i < s;
      gt += g[i];
      ht += h[i];
      if (left[i]) {
        gl += g[i];
        hl += h[i];
      }
    }
    const double via_prefix = gain_second_order(gl, hl, gt, ht);
    const double via_se = oracles::se_gain_from_derivatives(g, h, left);
    CHECK(std::abs(via_prefix - via_se) <=
          1e-9 * std::max(1.0, std::abs(via_se)));
  }
}

TEST_CASE("grow_tree splits a perfectly separated node") {
  // Feature code 0 carries derivative +1, code 1 carries -1; the left leaf
  // value is then -sum(g)/sum(h) = -1 and the right +1.
  const Index n = 10;
  CodeMatrix codes(n, 1);
  Vector grad(n), hess = Vector::Ones(n);
  for (Index i = 0; i < n; ++i) {
    codes(i, 0) = i < 5 ? 0 : 1;
    grad[i] = i < 5 ? 1.0 : -1.0;
  }
  TreeOptions opt;
  opt.max_leaves = 2;
  RegressionTree tree = grow_tree(codes, grad, &hess, opt);
  CHECK(tree.leaf_count == 2);
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == 0);
  CHECK(tree.nodes[tree.nodes[0].left].value == -1.0);
  CHECK(tree.nodes[tree.nodes[0].right].value == 1.0);

  CodeVector row(1);
  row << 0;
  CHECK(predict_tree(tree, row) == -1.0);
  row << 1;
  CHECK(predict_tree(tree, row) == 1.0);
}

TEST_CASE("grow_tree keeps a single leaf on constant gradients") {
  auto gen = oracles::rng(55);
  CodeMatrix codes(12, 2);
  for (Index i = 0; i < 12; ++i) {
    codes(i, 0) = static_cast<int>(gen() % 4);
    codes(i, 1) = static_cast<int>(gen() % 4);
  }
  for (double g : {0.1, -2.7, 1234.5}) {
    Vector grad = Vector::Constant(12, g);
    Vector hess = Vector::Constant(12, 2.0);
    TreeOptions opt;
    opt.max_leaves = 4;
    RegressionTree tree = grow_tree(codes, grad, &hess, opt);
    CHECK(tree.leaf_count == 1);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].value == doctest::Approx(-g / 2.0));
  }
}

TEST_CASE("grow_tree root split attains the exhaustive-search maximum") {
  auto gen = oracles::rng(56);
  std::uniform_real_distribution<double> gd(-2.0, 2.0);
  std::uniform_real_distribution<double> hd(0.2, 3.0);
  int splits_seen = 0;
  for (int it = 0; it < 200; ++it) {
    const Index n = 4 + static_cast<Index>(gen() % 27);
    const Index d = 1 + static_cast<Index>(gen() % 3);
    CodeMatrix codes(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < d; ++j) codes(i, j) = static_cast<int>(gen() % 6);
    std::vector<double> g(static_cast<std::size_t>(n)),
        h(static_cast<std::size_t>(n));
    Vector gv(n), hv(n);
    for (Index i = 0; i < n; ++i) {
      gv[i] = gd(gen);
      hv[i] = hd(gen);
      g[static_cast<std::size_t>(i)] = gv[i];
      h[static_cast<std::size_t>(i)] = hv[i];
    }
    TreeOptions opt;
    opt.max_leaves = 2;
    RegressionTree tree = grow_tree(codes, gv, &hv, opt);
    oracles::ExhaustiveSplit oracle = oracles::exhaustive_best_split(codes, g, h);

    if (tree.leaf_count == 1) {
      // No acceptable split; the oracle maximum must be negligible too.
      if (oracle.found) CHECK(oracle.gain <= 1e-9);
      continue;
    }
    ++splits_seen;
    REQUIRE(oracle.found);
    // Score the chosen split with the oracle formula and compare maxima.
    std::vector<bool> left(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      left[static_cast<std::size_t>(i)] =
          codes(i, tree.nodes[0].feature) <= tree.nodes[0].threshold;
    }
    const double chosen = oracles::se_gain_from_derivatives(g, h, left);
    CHECK(std::abs(chosen - oracle.gain) <=
          1e-9 * std::max(1.0, std::abs(oracle.gain)));
  }
  CHECK(splits_seen > 150);
}

TEST_CASE("grow_tree respects the terminal node budget exactly") {
  auto gen = oracles::rng(57);
  const Index n = 200;
  CodeMatrix codes(n, 3);
  Vector grad(n), hess(n);
  std::uniform_real_distribution<double> gd(-1.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 3; ++j) codes(i, j) = static_cast<int>(gen() % 32);
    grad[i] = gd(gen);
    hess[i] = 2.0;
  }
  for (int J : {2, 6, 10, 20}) {
    TreeOptions opt;
    opt.max_leaves = J;
    RegressionTree tree = grow_tree(codes, grad, &hess, opt);
    CHECK(tree.leaf_count == J);
    CHECK(tree.nodes.size() == 2 * static_cast<std::size_t>(J) - 1);
  }
  TreeOptions bad;
  bad.max_leaves = 1;
  CHECK_THROWS_AS(grow_tree(codes, grad, &hess, bad), std::invalid_argument);
}

TEST_CASE("min_leaf keeps both split sides populated") {
  auto gen = oracles::rng(58);
  const Index n = 60;
  CodeMatrix codes(n, 2);
  Vector grad(n), hess = Vector::Constant(n, 2.0);
  std::uniform_real_distribution<double> gd(-1.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    codes(i, 0) = static_cast<int>(gen() % 16);
    codes(i, 1) = static_cast<int>(gen() % 16);
    grad[i] = gd(gen);
  }
  TreeOptions opt;
  opt.max_leaves = 8;
  opt.min_leaf = 5;
  RegressionTree tree = grow_tree(codes, grad, &hess, opt);
  std::vector<int> counts(tree.nodes.size(), 0);
  for (Index i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(tree.leaf_index(codes.row(i)))]++;
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].is_leaf()) CHECK(counts[k] >= 5);
  }
}

TEST_CASE("histogram bookkeeping: side sums reproduce node totals exactly") {
  // Integer-valued derivatives make summation order irrelevant, so the
  // equality can be checked exactly over every candidate split.
  auto gen = oracles::rng(59);
  const Index n = 40;
  CodeMatrix codes(n, 2);
  std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    codes(i, 0) = static_cast<int>(gen() % 8);
    codes(i, 1) = static_cast<int>(gen() % 8);
    g[static_cast<std::size_t>(i)] = static_cast<double>(static_cast<int>(gen() % 21) - 10);
    h[static_cast<std::size_t>(i)] = static_cast<double>(1 + gen() % 5);
  }
  const double g_total = std::accumulate(g.begin(), g.end(), 0.0);
  const double h_total = std::accumulate(h.begin(), h.end(), 0.0);
  for (Index f = 0; f < 2; ++f) {
    for (int t = 0; t < 7; ++t) {
      double gl = 0.0, hl = 0.0, gr = 0.0, hr = 0.0;
      Index cl = 0, cr = 0;
      for (Index i = 0; i < n; ++i) {
        if (codes(i, f) <= t) {
          gl += g[static_cast<std::size_t>(i)];
          hl += h[static_cast<std::size_t>(i)];
          ++cl;
        } else {
          gr += g[static_cast<std::size_t>(i)];
          hr += h[static_cast<std::size_t>(i)];
          ++cr;
        }
      }
      CHECK(gl + gr == g_total);
      CHECK(hl + hr == h_total);
      CHECK(cl + cr == n);
    }
  }
}

TEST_CASE("leaf values are the weighted means of the responses") {
  auto gen = oracles::rng(60);
  const Index n = 80;
  CodeMatrix codes(n, 2);
  Vector grad(n), hess(n);
  std::uniform_real_distribution<double> zd(-2.0, 2.0);
  std::uniform_real_distribution<double> wd(0.5, 3.0);
  Vector z(n), w(n);
  for (Index i = 0; i < n; ++i) {
    codes(i, 0) = static_cast<int>(gen() % 10);
    codes(i, 1) = static_cast<int>(gen() % 10);
    z[i] = zd(gen);
    w[i] = wd(gen);
    grad[i] = -z[i] * w[i];  // L' = -z w
    hess[i] = w[i];          // L'' = w
  }
  TreeOptions opt;
  opt.max_leaves = 6;
  RegressionTree tree = grow_tree(codes, grad, &hess, opt);

  std::vector<double> zw(tree.nodes.size(), 0.0), ws(tree.nodes.size(), 0.0);
  for (Index i = 0; i < n; ++i) {
    const auto leaf = static_cast<std::size_t>(tree.leaf_index(codes.row(i)));
    zw[leaf] += z[i] * w[i];
    ws[leaf] += w[i];
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (!tree.nodes[k].is_leaf()) continue;
    REQUIRE(ws[k] > 0.0);
    CHECK(tree.nodes[k].value == doctest::Approx(zw[k] / ws[k]).epsilon(1e-12));
  }
}

TEST_CASE("first-order growth uses counts and the loss-power leaf divisor") {
  // Two groups separated by one feature; no hessians supplied.
  const Index n = 12;
  CodeMatrix codes(n, 1);
  Vector grad(n);
  for (Index i = 0; i < n; ++i) {
    codes(i, 0) = i < 8 ? 0 : 1;
    grad[i] = i < 8 ? -3.0 : 6.0;
  }
  TreeOptions opt;
  opt.max_leaves = 2;
  opt.loss_power = 1.5;
  RegressionTree tree = grow_tree(codes, grad, nullptr, opt);
  REQUIRE(tree.leaf_count == 2);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == 0);
  // Leaf value is -sum(grad) / (loss_power * count).
  CHECK(tree.nodes[tree.nodes[0].left].value ==
        doctest::Approx(24.0 / (1.5 * 8.0)).epsilon(1e-14));
  CHECK(tree.nodes[tree.nodes[0].right].value ==
        doctest::Approx(-24.0 / (1.5 * 4.0)).epsilon(1e-14));
  // The chosen split maximizes the unit-weight gain.
  CHECK(gain_first_order(-24.0, 8, 0.0, 12) ==
        doctest::Approx(72.0 + 144.0 - 0.0).epsilon(1e-14));
}

TEST_CASE("equal gains break ties to the lowest feature, then threshold") {
  // Duplicate columns: both features score identically, feature 0 must win.
  CodeMatrix codes(4, 2);
  codes << 0, 0, 0, 0, 1, 1, 1, 1;
  Vector grad(4), hess = Vector::Ones(4);
  grad << 1, 1, -1, -1;
  TreeOptions opt;
  opt.max_leaves = 2;
  RegressionTree two_features = grow_tree(codes, grad, &hess, opt);
  REQUIRE(two_features.leaf_count == 2);
  CHECK(two_features.nodes[0].feature == 0);

  // Symmetric three-code layout: thresholds 0 and 1 tie, 0 must win.
  CodeMatrix codes3(3, 1);
  codes3 << 0, 1, 2;
  Vector grad3(3), hess3 = Vector::Ones(3);
  grad3 << 1, 0, -1;
  CHECK(gain_second_order(1.0, 1.0, 0.0, 3.0) ==
        gain_second_order(1.0, 2.0, 0.0, 3.0));
  RegressionTree three_codes = grow_tree(codes3, grad3, &hess3, opt);
  REQUIRE(three_codes.leaf_count == 2);
  CHECK(three_codes.nodes[0].threshold == 0);
}

TEST_CASE("predict_tree basics") {
  RegressionTree single;
  TreeNode leaf;
  leaf.value = 0.7;
  single.nodes.push_back(leaf);
  single.leaf_count = 1;
  CodeVector row(3);
  row << 0, 5, 2;
  CHECK(predict_tree(single, row) == 0.7);
  CHECK(predict_tree(single, row) == predict_tree(single, row));
}
