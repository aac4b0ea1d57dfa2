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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgmmboost/bench.hpp"
#include "pgmmboost/dataset.hpp"
#include "pgmmboost/model_io.hpp"

namespace {

using namespace pgmmboost;

struct CliArgs {
  std::string config_path;
  std::string data;
  std::string target;
  std::string method = "LR";
  std::vector<double> lambdas, gammas, powers, shrinkages;
  std::vector<int> leaves;
  int max_iterations = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  long long train_count = 0;
  std::string out;
  int workers = -1;
  int max_bins = 0;
  int min_leaf = 0;
  std::optional<bool> has_header;
};

void add_experiment_options(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "key=value config file; explicit flags take precedence");
  cmd->add_option("--data", args.data, "input CSV file");
  cmd->add_option("--target", args.target,
                  "target column name (requires header) or zero-based index");
  cmd->add_option("--method", args.method, "LR, RBF, GMM, PGMM, or LPBOOST");
  cmd->add_option("--lambda", args.lambdas, "ridge regularization value(s)")
      ->delimiter(',');
  cmd->add_option("--gamma", args.gammas, "RBF bandwidth value(s)")
      ->delimiter(',');
  cmd->add_option("--p", args.powers, "kernel or loss power value(s)")
      ->delimiter(',');
  cmd->add_option("--J", args.leaves, "terminal nodes per tree")
      ->delimiter(',');
  cmd->add_option("--nu", args.shrinkages, "shrinkage value(s)")
      ->delimiter(',');
  cmd->add_option("--M", args.max_iterations, "maximum boosting iterations");
  cmd->add_option("--epsilon", args.epsilon, "early-stop scale");
  cmd->add_option("--seed", args.seed, "split shuffle seed");
  cmd->add_option("--train-count", args.train_count,
                  "rows assigned to the training split");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--workers", args.workers,
                  "worker threads for independent grid groups (0 = auto)");
  cmd->add_option("--max-bins", args.max_bins, "histogram bins per feature");
  cmd->add_option("--min-leaf", args.min_leaf, "minimum samples per leaf side");
  cmd->add_flag("--has-header,!--no-header",
                [&args](std::int64_t count) { args.has_header = count > 0; },
                "override header autodetection");
}

ExperimentConfig build_config(const CLI::App* cmd, const CliArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) load_config_file(args.config_path, cfg);

  auto given = [cmd](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (given("--data")) cfg.data_path = args.data;
  if (given("--target")) cfg.target = args.target;
  if (given("--method")) cfg.method = parse_method(args.method);
  if (given("--lambda")) cfg.lambdas = args.lambdas;
  if (given("--gamma")) cfg.gammas = args.gammas;
  if (given("--p")) cfg.powers = args.powers;
  if (given("--J")) cfg.leaves = args.leaves;
  if (given("--nu")) cfg.shrinkages = args.shrinkages;
  if (given("--M")) cfg.max_iterations = args.max_iterations;
  if (given("--epsilon")) cfg.epsilon = args.epsilon;
  if (given("--seed")) cfg.seed = args.seed;
  if (given("--train-count")) cfg.train_count = static_cast<Index>(args.train_count);
  if (given("--out")) cfg.out_dir = args.out;
  if (given("--workers")) cfg.workers = args.workers;
  if (given("--max-bins")) cfg.max_bins = args.max_bins;
  if (given("--min-leaf")) cfg.min_leaf = args.min_leaf;
  if (args.has_header.has_value()) cfg.has_header = args.has_header;
  return cfg;
}

int run_fit(const ExperimentConfig& cfg) {
  SingleFit fit = fit_single(cfg);
  std::cout << "method=" << method_name(cfg.method) << " "
            << fit.cell.params_label(cfg.method)
            << " n_train=" << fit.n_train << " n_test=" << fit.n_test << "\n";
  std::cout << "train_mse=" << format_double(fit.cell.train_mse)
            << " test_mse=" << format_double(fit.cell.test_mse);
  if (fit.cell.iterations_run > 0) {
    std::cout << " (best iteration " << fit.cell.best_iteration << " of "
              << fit.cell.iterations_run
              << "; final test_mse=" << format_double(fit.cell.test_mse_final)
              << ")";
  }
  std::cout << "\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string model_path =
        (std::filesystem::path(cfg.out_dir) / "model.json").string();
    save_model(fit.model, model_path);
    std::cout << "model written to " << model_path << "\n";
  }
  return 0;
}

int run_grid(const ExperimentConfig& cfg) {
  MetricReport report = run_experiment(cfg);
  if (cfg.out_dir.empty()) {
    std::cout << report.human_table();
  } else {
    std::cout << "best: " << report.best().params_label(report.method)
              << " test_mse=" << format_double(report.best().test_mse) << "\n";
    std::cout << "report written to " << cfg.out_dir << "\n";
  }
  return 0;
}

int run_curves(const ExperimentConfig& cfg, const std::string& kind_name) {
  const CurveKind kind = parse_curve_kind(kind_name);
  ExperimentConfig quiet = cfg;
  quiet.out_dir.clear();  // curve files only; no report triple
  MetricReport report = run_experiment(quiet);
  const std::string out_dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  for (const std::string& path : emit_curves(report, kind, out_dir)) {
    std::cout << path << "\n";
  }
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& target, std::optional<bool> has_header,
                const std::string& out_path) {
  SavedModel model = load_model(model_path);

  Matrix features;
  std::optional<Vector> targets;
  if (!target.empty()) {
    const TargetSelector selector = parse_target_selector(target);
    const bool header = has_header.value_or(
        std::holds_alternative<std::string>(selector));
    Dataset ds = load_csv(data_path, selector, header);
    features = ds.features;
    targets = ds.targets;
  } else {
    features = load_features_csv(data_path, has_header.value_or(false));
  }

  const Vector predictions = model.predict(features);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw DatasetError("cannot write " + out_path);
    out = &file;
  }
  (*out) << "prediction\n";
  for (Index i = 0; i < predictions.size(); ++i) {
    (*out) << format_double(predictions[i]) << "\n";
  }
  if (targets) {
    std::cerr << "mse=" << format_double(mean_squared_error(*targets, predictions))
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel ridge regression and boosted tree benchmark toolkit"};
  app.require_subcommand(1);

  CliArgs fit_args, grid_args, curves_args;
  std::string curve_kind = "mse_vs_lambda";
  std::string predict_model, predict_data, predict_target, predict_out;
  std::optional<bool> predict_has_header;

  CLI::App* fit_cmd = app.add_subcommand("fit", "train one configuration");
  add_experiment_options(fit_cmd, fit_args);

  CLI::App* grid_cmd =
      app.add_subcommand("grid", "sweep the full parameter grid");
  add_experiment_options(grid_cmd, grid_args);

  CLI::App* curves_cmd =
      app.add_subcommand("curves", "run a sweep and emit curve tables");
  add_experiment_options(curves_cmd, curves_args);
  curves_cmd->add_option("--kind", curve_kind,
                         "mse_vs_lambda, mse_vs_p, or mse_vs_iteration");

  CLI::App* predict_cmd =
      app.add_subcommand("predict", "predict a CSV with a saved model");
  predict_cmd->add_option("--model", predict_model, "saved model.json")
      ->required();
  predict_cmd->add_option("--data", predict_data, "input CSV")->required();
  predict_cmd->add_option("--target", predict_target,
                          "target column to drop (also reports its MSE)");
  predict_cmd->add_option("--out", predict_out,
                          "predictions CSV path (stdout when omitted)");
  predict_cmd->add_flag("--has-header,!--no-header",
                        [&predict_has_header](std::int64_t count) {
                          predict_has_header = count > 0;
                        },
                        "override header autodetection");

  try {
    app.parse(argc, argv);
    if (fit_cmd->parsed()) return run_fit(build_config(fit_cmd, fit_args));
    if (grid_cmd->parsed()) return run_grid(build_config(grid_cmd, grid_args));
    if (curves_cmd->parsed())
      return run_curves(build_config(curves_cmd, curves_args), curve_kind);
    if (predict_cmd->parsed()) {
      return run_predict(predict_model, predict_data, predict_target,
                         predict_has_header, predict_out);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const pgmmboost::DatasetError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 1;
  } catch (const pgmmboost::ModelIoError& e) {
    std::cerr << "error: model: " << e.what() << "\n";
    return 1;
  } catch (const pgmmboost::NotPositiveDefinite& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
