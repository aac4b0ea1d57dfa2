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

#include <doctest.h>

#include "oracles.hpp"
#include "pgmmboost/kernels.hpp"

using namespace pgmmboost;

TEST_CASE("transform_nonnegative splits coordinates into sign pairs") {
  Vector u(3);
  u << -3, 17, -0.8;
  Vector t = transform_nonnegative(u);
  Vector expected(6);
  expected << 0, 3, 17, 0, 0, 0.8;
  CHECK(oracles::exact_equal(t, expected));

  Vector zero(1);
  zero << 0;
  Vector tz = transform_nonnegative(zero);
  CHECK(tz[0] == 0.0);
  CHECK(tz[1] == 0.0);

  Vector pos(1);
  pos << 5;
  Vector tp = transform_nonnegative(pos);
  CHECK(tp[0] == 5.0);
  CHECK(tp[1] == 0.0);
}

TEST_CASE("transform_nonnegative: at most one of each pair is nonzero") {
  auto gen = oracles::rng(3);
  for (int it = 0; it < 200; ++it) {
    Vector u = oracles::random_vector(gen, 1 + it % 7, -5.0, 5.0);
    Vector t = transform_nonnegative(u);
    REQUIRE(t.size() == 2 * u.size());
    for (Index i = 0; i < u.size(); ++i) {
      CHECK(t[2 * i] >= 0.0);
      CHECK(t[2 * i + 1] >= 0.0);
      CHECK((t[2 * i] == 0.0 || t[2 * i + 1] == 0.0));
    }
  }
}

TEST_CASE("gmm scalar values") {
  Vector u(3), v(3);
  u << 1, -2, 0.5;
  CHECK(gmm(u, u) == 1.0);

  Vector a(1), b(1);
  a << 2;
  b << 1;
  CHECK(gmm(a, b) == 0.5);

  Vector c(2), d(2);
  c << 1, 0;
  d << 0, 1;
  CHECK(gmm(c, d) == 0.0);

  // All-zero pair: zero denominator returns 0 by convention.
  Vector z = Vector::Zero(2);
  CHECK(gmm(z, z) == 0.0);

  v << 1, 2, 3;
  Vector w(2);
  CHECK_THROWS_AS(gmm(v, w), std::invalid_argument);
}

TEST_CASE("pgmm scalar values") {
  Vector a(1), b(1);
  a << 2;
  b << 1;
  CHECK(pgmm(a, b, 2.0) == 0.25);

  auto gen = oracles::rng(4);
  for (int it = 0; it < 100; ++it) {
    Vector u = oracles::random_vector(gen, 4, -2.0, 2.0);
    Vector v = oracles::random_vector(gen, 4, -2.0, 2.0);
    CHECK(gmm(u, u) == 1.0);
    CHECK(pgmm(u, v, 1.0) == gmm(u, v));
    for (double p : {0.5, 2.0, 3.5}) {
      CHECK(pgmm(u, u, p) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(pgmm(a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pgmm(a, b, -1.0), std::invalid_argument);
}

TEST_CASE("rbf scalar values") {
  Vector u(2);
  u << 0.3, -0.7;
  CHECK(rbf(u, u, 2.5) == 1.0);

  Vector a(1), b(1);
  a << 0;
  b << 1;
  CHECK(rbf(a, b, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(rbf(a, b, 1e4) < 1e-300);
  CHECK_THROWS_AS(rbf(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("kernel_matrix linear equals the Gram product") {
  auto gen = oracles::rng(5);
  Matrix X = oracles::random_matrix(gen, 6, 3);
  Matrix K = kernel_matrix(X, X, KernelSpec::linear());
  Matrix G = X * X.transpose();
  CHECK(oracles::exact_equal(K, G));
}

TEST_CASE("kernel_matrix gmm has a unit diagonal for nonzero rows") {
  auto gen = oracles::rng(6);
  Matrix X = oracles::random_matrix(gen, 8, 4, 0.1, 2.0);
  Matrix K = kernel_matrix(X, X, KernelSpec::gmm());
  for (Index i = 0; i < X.rows(); ++i) CHECK(K(i, i) == 1.0);
}

TEST_CASE("kernel_matrix pgmm entries match scalar calls") {
  auto gen = oracles::rng(7);
  Matrix A = oracles::random_matrix(gen, 3, 2);
  Matrix B = oracles::random_matrix(gen, 2, 2);
  Matrix K = kernel_matrix(A, B, KernelSpec::pgmm(2.0));
  REQUIRE(K.rows() == 3);
  REQUIRE(K.cols() == 2);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 2; ++j) {
      CHECK(K(i, j) ==
            doctest::Approx(pgmm(A.row(i).transpose(), B.row(j).transpose(), 2.0))
                .epsilon(1e-14));
    }
  }
  Matrix C = oracles::random_matrix(gen, 2, 3);
  CHECK_THROWS_AS(kernel_matrix(A, C, KernelSpec::gmm()), std::invalid_argument);
}

TEST_CASE("kernel_matrix symmetry and boundedness") {
  auto gen = oracles::rng(8);
  Matrix X = oracles::random_matrix(gen, 20, 5, -3.0, 3.0);
  for (const KernelSpec& spec :
       {KernelSpec::linear(), KernelSpec::rbf(0.5), KernelSpec::gmm(),
        KernelSpec::pgmm(2.5)}) {
    Matrix K = kernel_matrix(X, X, spec);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    if (spec.kind == KernelKind::Gmm || spec.kind == KernelKind::Pgmm) {
      CHECK(K.minCoeff() >= 0.0);
      CHECK(K.maxCoeff() <= 1.0);
    }
    if (spec.kind == KernelKind::Rbf) {
      CHECK(K.minCoeff() > 0.0);
      CHECK(K.maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("pgmm power-transform equivalence against the literal form") {
  auto gen = oracles::rng(9);
  for (int it = 0; it < 500; ++it) {
    const Index d = 1 + it % 8;
    Vector u = oracles::random_vector(gen, d, -4.0, 4.0);
    Vector v = oracles::random_vector(gen, d, -4.0, 4.0);
    for (double p : {0.25, 0.5, 1.5, 2.0, 3.0, 8.0}) {
      const double via_powered_transform = pgmm(u, v, p);
      const double via_literal = oracles::pgmm_literal(u, v, p);
      CHECK(std::abs(via_powered_transform - via_literal) <=
            1e-10 * std::max(1.0, std::abs(via_literal)));
    }
  }
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::rbf(-1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::pgmm(0.0).validate(), std::invalid_argument);
  CHECK_NOTHROW(KernelSpec::linear().validate());
  CHECK(KernelSpec::pgmm(2.0).name() == "pgmm");
}
