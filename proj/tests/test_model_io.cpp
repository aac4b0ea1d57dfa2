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

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "pgmmboost/model_io.hpp"

using namespace pgmmboost;

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& suffix) {
    static int counter = 0;
    path = (std::filesystem::temp_directory_path() /
            ("pgmmboost_io_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++) + suffix))
               .string();
  }
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("linear ridge model round trip predicts bit-identically") {
  auto gen = oracles::rng(80);
  Matrix X = oracles::random_matrix(gen, 30, 4);
  Vector y = oracles::random_vector(gen, 30);
  SavedModel saved;
  saved.model = fit_linear_ridge(X, y, 0.5, true);
  saved.scaling = fit_scaling(X);

  TempPath file(".json");
  save_model(saved, file.path);
  SavedModel back = load_model(file.path);
  CHECK(back.type() == "linear_ridge");
  REQUIRE(back.scaling.has_value());

  Matrix probe = oracles::random_matrix(gen, 10, 4);
  CHECK(oracles::exact_equal(saved.predict(probe), back.predict(probe)));
}

TEST_CASE("kernel ridge model round trip predicts bit-identically") {
  auto gen = oracles::rng(81);
  Matrix X = oracles::random_matrix(gen, 20, 3);
  Vector y = oracles::random_vector(gen, 20);
  SavedModel saved;
  saved.model = fit_kernel_ridge(X, y, 0.1, KernelSpec::pgmm(2.5));
  TempPath file(".json");
  save_model(saved, file.path);
  SavedModel back = load_model(file.path);
  CHECK(back.type() == "kernel_ridge");

  Matrix probe = oracles::random_matrix(gen, 7, 3);
  CHECK(oracles::exact_equal(saved.predict(probe), back.predict(probe)));
}

TEST_CASE("boost model round trip predicts bit-identically") {
  auto gen = oracles::rng(82);
  Matrix X = oracles::random_matrix(gen, 50, 3);
  Vector y(50);
  for (Index i = 0; i < 50; ++i) y[i] = X(i, 0) * 2.0 - X(i, 2);
  BoostOptions opt;
  opt.p = 2.5;
  opt.num_leaves = 4;
  opt.max_iterations = 10;
  SavedModel saved;
  saved.model = fit_lp_boost(X, y, opt);
  saved.scaling = fit_scaling(X);

  TempPath file(".json");
  save_model(saved, file.path);
  SavedModel back = load_model(file.path);
  CHECK(back.type() == "lp_boost");
  const auto& model = std::get<BoostModel>(back.model);
  CHECK(model.iterations_run == 10);
  CHECK(model.train_lp_history.size() == 10);

  Matrix probe = oracles::random_matrix(gen, 15, 3);
  CHECK(oracles::exact_equal(saved.predict(probe), back.predict(probe)));
}

TEST_CASE("truncated model files raise a format error") {
  auto gen = oracles::rng(83);
  Matrix X = oracles::random_matrix(gen, 10, 2);
  Vector y = oracles::random_vector(gen, 10);
  SavedModel saved;
  saved.model = fit_linear_ridge(X, y, 1.0, false);
  TempPath file(".json");
  save_model(saved, file.path);

  std::string text;
  {
    std::ifstream in(file.path);
    text.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
  }
  {
    std::ofstream out(file.path, std::ios::trunc);
    out << text.substr(0, text.size() / 2);
  }
  try {
    load_model(file.path);
    FAIL("expected ModelIoError");
  } catch (const ModelIoError& e) {
    CHECK(e.kind() == ModelIoError::Kind::Format);
  }
}

TEST_CASE("version mismatches raise an incompatibility error") {
  auto gen = oracles::rng(84);
  Matrix X = oracles::random_matrix(gen, 10, 2);
  Vector y = oracles::random_vector(gen, 10);
  SavedModel saved;
  saved.model = fit_linear_ridge(X, y, 1.0, false);
  TempPath file(".json");
  save_model(saved, file.path);

  nlohmann::json j;
  {
    std::ifstream in(file.path);
    j = nlohmann::json::parse(in);
  }
  j["version"] = kModelFormatVersion + 1;
  {
    std::ofstream out(file.path, std::ios::trunc);
    out << j.dump();
  }
  try {
    load_model(file.path);
    FAIL("expected ModelIoError");
  } catch (const ModelIoError& e) {
    CHECK(e.kind() == ModelIoError::Kind::Version);
  }
}

TEST_CASE("foreign json raises a format error, missing file an io error") {
  TempPath file(".json");
  {
    std::ofstream out(file.path);
    out << "{\"hello\": 1}";
  }
  try {
    load_model(file.path);
    FAIL("expected ModelIoError");
  } catch (const ModelIoError& e) {
    CHECK(e.kind() == ModelIoError::Kind::Format);
  }
  try {
    load_model("/nonexistent/model.json");
    FAIL("expected ModelIoError");
  } catch (const ModelIoError& e) {
    CHECK(e.kind() == ModelIoError::Kind::Io);
  }
}

TEST_CASE("embedded scaling is applied before prediction") {
  Matrix X(3, 1);
  X << 0, 2, 4;
  Vector y(3);
  y << 0, 1, 2;  // y = x/2 in raw units; x/4 * 2 after scaling
  ScalingParams scaling = fit_scaling(X);
  Matrix Xs = apply_scaling(X, scaling);
  SavedModel saved;
  saved.model = fit_linear_ridge(Xs, y, 0.0, false);
  saved.scaling = scaling;

  TempPath file(".json");
  save_model(saved, file.path);
  SavedModel back = load_model(file.path);
  Matrix probe(1, 1);
  probe << 3.0;
  CHECK(back.predict(probe)[0] == doctest::Approx(1.5).epsilon(1e-12));
}
