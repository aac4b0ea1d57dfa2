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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgmmboost/dataset.hpp"
#include "pgmmboost/model_io.hpp"
#include "pgmmboost/types.hpp"

namespace pgmmboost {

enum class Method { LR, RBF, GMM, PGMM, LPBOOST };

Method parse_method(const std::string& name);
std::string method_name(Method method);

/// Full description of one benchmark run: dataset, method, and the parameter
/// grids the method sweeps. Grids left empty are filled by apply_defaults().
struct ExperimentConfig {
  std::string data_path;
  std::string target;              // column name or zero-based index
  std::optional<bool> has_header;  // autodetected when unset
  Method method = Method::LR;

  std::vector<double> lambdas;  // ridge regularization sweep
  std::vector<double> gammas;   // RBF bandwidth sweep
  std::vector<double> powers;   // kernel p (PGMM) or loss p (LPBOOST)
  std::vector<int> leaves;      // terminal nodes per tree (J)
  std::vector<double> shrinkages;

  int max_iterations = 10000;
  double epsilon = 1e-5;
  std::uint64_t seed = 1;
  Index train_count = 0;
  std::string out_dir;
  int workers = 0;  // 0 = one per hardware thread, capped at 8
  int max_bins = 255;
  int min_leaf = 1;

  static std::vector<double> default_lambdas();
  static std::vector<double> default_gammas();
  static std::vector<double> default_pgmm_powers();
  static std::vector<double> default_boost_powers();
  static std::vector<int> default_leaves();
  static std::vector<double> default_shrinkages();

  void apply_defaults();
  void validate() const;  // throws std::invalid_argument
};

/// Flat key=value overrides ('#' starts a comment). Recognized keys mirror
/// the CLI flags; values given on the command line take precedence.
void load_config_file(const std::string& path, ExperimentConfig& config);

constexpr double kUnsetParam = std::numeric_limits<double>::quiet_NaN();

struct CellResult {
  double lambda = kUnsetParam;
  double gamma = kUnsetParam;
  double p = kUnsetParam;
  double nu = kUnsetParam;
  int leaves = 0;

  double train_mse = 0.0;
  double test_mse = 0.0;  // for boosting: best over iterations
  double train_mse_final = kUnsetParam;
  double test_mse_final = kUnsetParam;
  int best_iteration = 0;
  int iterations_run = 0;
  double solver_jitter = 0.0;  // nonzero when the Cholesky needed a diagonal shift
  double wall_ms = 0.0;

  std::vector<double> test_mse_history;
  std::vector<double> train_mse_history;

  std::string params_label(Method method) const;
};

struct MetricReport {
  Method method = Method::LR;
  std::string dataset;
  Index n_train = 0;
  Index n_test = 0;
  Index dims = 0;
  std::vector<CellResult> cells;
  std::size_t best_cell = 0;
  double total_wall_ms = 0.0;

  const CellResult& best() const { return cells.at(best_cell); }
  nlohmann::json to_json(bool include_timing = true) const;
  std::string human_table() const;
  std::string machine_lines() const;  // one key=value record per cell
  std::vector<std::string> write_files(const std::string& out_dir) const;
};

/// Runs the configured method over its full parameter grid: loads the CSV,
/// splits deterministically by seed, scales features to [0, 1] on training
/// statistics, fits every grid cell, and reports per-cell and best MSEs.
/// Kernel methods build the training kernel once per kernel parameter and
/// reuse it across the lambda sweep; independent grid groups run on a small
/// worker pool.
MetricReport run_experiment(const ExperimentConfig& config);

/// Same sweep on already-loaded raw (unscaled) train/test data.
MetricReport run_experiment_on(const ExperimentConfig& config,
                               const Dataset& train_raw,
                               const Dataset& test_raw);

struct SingleFit {
  SavedModel model;
  CellResult cell;
  Index n_train = 0;
  Index n_test = 0;
};

/// Fits one configuration (every consumed grid must hold exactly one value)
/// and returns the trained model with its scaling attached.
SingleFit fit_single(const ExperimentConfig& config);

enum class CurveKind { MseVsLambda, MseVsP, MseVsIteration };

CurveKind parse_curve_kind(const std::string& name);

/// Writes plain-text curve tables: column 1 is the axis value, later columns
/// are MSE series named in the header line. Returns the written paths.
std::vector<std::string> emit_curves(const MetricReport& report,
                                     CurveKind kind,
                                     const std::string& out_dir);

}  // namespace pgmmboost
