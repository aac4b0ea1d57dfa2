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

#include "pgmmboost/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pgmmboost/boosting.hpp"
#include "pgmmboost/kernels.hpp"
#include "pgmmboost/ridge.hpp"

namespace pgmmboost {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs independent jobs on up to `workers` threads. Job outputs go to
// preassigned slots, so the report is identical for any worker count.
void run_jobs(std::vector<std::function<void()>>& jobs, int workers) {
  if (workers <= 1 || jobs.size() <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      try {
        jobs[idx]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count =
      std::min<std::size_t>(static_cast<std::size_t>(workers), jobs.size());
  pool.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

bool detect_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!detail::trim(line).empty()) break;
  }
  double value = 0.0;
  for (const auto& field : detail::split_fields(line)) {
    if (!parse_double(field, value)) return true;
  }
  return false;
}

std::string format_param(double v) { return format_double(v); }

}  // namespace

Method parse_method(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), ::toupper);
  if (up == "LR") return Method::LR;
  if (up == "RBF") return Method::RBF;
  if (up == "GMM") return Method::GMM;
  if (up == "PGMM") return Method::PGMM;
  if (up == "LPBOOST") return Method::LPBOOST;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected LR, RBF, GMM, PGMM, or LPBOOST)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::LR: return "LR";
    case Method::RBF: return "RBF";
    case Method::GMM: return "GMM";
    case Method::PGMM: return "PGMM";
    case Method::LPBOOST: return "LPBOOST";
  }
  return "?";
}

std::vector<double> ExperimentConfig::default_lambdas() {
  return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
}

std::vector<double> ExperimentConfig::default_gammas() {
  std::vector<double> g;
  for (int e = -8; e <= 8; e += 2) g.push_back(std::ldexp(1.0, e));
  return g;
}

std::vector<double> ExperimentConfig::default_pgmm_powers() {
  return {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0};
}

std::vector<double> ExperimentConfig::default_boost_powers() {
  return {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0, 10.0};
}

std::vector<int> ExperimentConfig::default_leaves() { return {6, 10, 20}; }

std::vector<double> ExperimentConfig::default_shrinkages() {
  return {0.06, 0.1, 0.2};
}

void ExperimentConfig::apply_defaults() {
  if (lambdas.empty()) lambdas = default_lambdas();
  if (gammas.empty()) gammas = default_gammas();
  if (powers.empty()) {
    powers = method == Method::LPBOOST ? default_boost_powers()
                                       : default_pgmm_powers();
  }
  if (leaves.empty()) leaves = default_leaves();
  if (shrinkages.empty()) shrinkages = default_shrinkages();
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(!data_path.empty(), "missing data path");
  require(!target.empty(), "missing target column");
  require(train_count >= 1, "train_count must be >= 1");
  require(max_iterations >= 1, "M must be >= 1");
  require(epsilon > 0.0, "epsilon must be > 0");
  require(max_bins >= 2, "max_bins must be >= 2");
  require(min_leaf >= 1, "min_leaf must be >= 1");
  require(workers >= 0, "workers must be >= 0");
  switch (method) {
    case Method::LR:
      require(!lambdas.empty(), "LR requires a lambda grid");
      break;
    case Method::RBF:
      require(!lambdas.empty(), "RBF requires a lambda grid");
      require(!gammas.empty(), "RBF requires a gamma grid");
      for (double g : gammas) require(g > 0.0, "gamma values must be > 0");
      break;
    case Method::GMM:
      require(!lambdas.empty(), "GMM requires a lambda grid");
      break;
    case Method::PGMM:
      require(!lambdas.empty(), "PGMM requires a lambda grid");
      require(!powers.empty(), "PGMM requires a p grid");
      for (double p : powers) require(p > 0.0, "pGMM p values must be > 0");
      break;
    case Method::LPBOOST:
      require(!powers.empty(), "LPBOOST requires a p grid");
      require(!leaves.empty(), "LPBOOST requires a J grid");
      require(!shrinkages.empty(), "LPBOOST requires a nu grid");
      for (double p : powers) require(p >= 1.0, "loss p values must be >= 1");
      for (int j : leaves) require(j >= 2, "J values must be >= 2");
      for (double nu : shrinkages)
        require(nu > 0.0 && nu <= 1.0, "nu values must be in (0, 1]");
      break;
  }
  for (double l : lambdas)
    require(l >= 0.0, "lambda values must be >= 0");
}

void load_config_file(const std::string& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);

  auto parse_list = [](const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v = 0.0;
      if (!parse_double(detail::trim(item), v))
        throw std::invalid_argument("bad numeric list entry '" + item + "'");
      out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list");
    return out;
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "data") {
        config.data_path = value;
      } else if (key == "target") {
        config.target = value;
      } else if (key == "has_header") {
        config.has_header = (value == "true" || value == "1" || value == "yes");
      } else if (key == "method") {
        config.method = parse_method(value);
      } else if (key == "lambda") {
        config.lambdas = parse_list(value);
      } else if (key == "gamma") {
        config.gammas = parse_list(value);
      } else if (key == "p") {
        config.powers = parse_list(value);
      } else if (key == "J") {
        config.leaves.clear();
        for (double v : parse_list(value))
          config.leaves.push_back(static_cast<int>(v));
      } else if (key == "nu") {
        config.shrinkages = parse_list(value);
      } else if (key == "M") {
        config.max_iterations = std::stoi(value);
      } else if (key == "epsilon") {
        double v;
        if (!parse_double(value, v))
          throw std::invalid_argument("bad epsilon '" + value + "'");
        config.epsilon = v;
      } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(std::stoull(value));
      } else if (key == "train_count") {
        config.train_count = static_cast<Index>(std::stoll(value));
      } else if (key == "out") {
        config.out_dir = value;
      } else if (key == "workers") {
        config.workers = std::stoi(value);
      } else if (key == "max_bins") {
        config.max_bins = std::stoi(value);
      } else if (key == "min_leaf") {
        config.min_leaf = std::stoi(value);
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
}

std::string CellResult::params_label(Method method) const {
  std::ostringstream out;
  switch (method) {
    case Method::LR:
      out << "lambda=" << format_param(lambda);
      break;
    case Method::RBF:
      out << "gamma=" << format_param(gamma) << " lambda=" << format_param(lambda);
      break;
    case Method::GMM:
      out << "lambda=" << format_param(lambda);
      break;
    case Method::PGMM:
      out << "p=" << format_param(p) << " lambda=" << format_param(lambda);
      break;
    case Method::LPBOOST:
      out << "p=" << format_param(p) << " J=" << leaves
          << " nu=" << format_param(nu);
      break;
  }
  return out.str();
}

nlohmann::json MetricReport::to_json(bool include_timing) const {
  nlohmann::json j;
  j["method"] = method_name(method);
  j["dataset"] = dataset;
  j["n_train"] = n_train;
  j["n_test"] = n_test;
  j["dims"] = dims;
  j["best_cell"] = best_cell;
  if (include_timing) j["total_wall_ms"] = total_wall_ms;
  nlohmann::json cells_json = nlohmann::json::array();
  for (const CellResult& c : cells) {
    nlohmann::json cj;
    if (!std::isnan(c.lambda)) cj["lambda"] = c.lambda;
    if (!std::isnan(c.gamma)) cj["gamma"] = c.gamma;
    if (!std::isnan(c.p)) cj["p"] = c.p;
    if (!std::isnan(c.nu)) cj["nu"] = c.nu;
    if (c.leaves > 0) cj["J"] = c.leaves;
    cj["train_mse"] = c.train_mse;
    cj["test_mse"] = c.test_mse;
    if (!std::isnan(c.train_mse_final)) cj["train_mse_final"] = c.train_mse_final;
    if (!std::isnan(c.test_mse_final)) cj["test_mse_final"] = c.test_mse_final;
    if (c.iterations_run > 0) {
      cj["best_iteration"] = c.best_iteration;
      cj["iterations_run"] = c.iterations_run;
      cj["test_mse_history"] = c.test_mse_history;
      cj["train_mse_history"] = c.train_mse_history;
    }
    if (c.solver_jitter > 0.0) cj["solver_jitter"] = c.solver_jitter;
    if (include_timing) cj["wall_ms"] = c.wall_ms;
    cells_json.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells_json);
  return j;
}

std::string MetricReport::human_table() const {
  std::ostringstream out;
  out << "dataset: " << dataset << "  (n_train=" << n_train
      << ", n_test=" << n_test << ", dims=" << dims << ")\n";
  out << "method: " << method_name(method) << "\n\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellResult& c = cells[i];
    out << (i == best_cell ? "* " : "  ") << std::left << std::setw(40)
        << c.params_label(method);
    out << "  train_mse=" << format_param(c.train_mse)
        << "  test_mse=" << format_param(c.test_mse);
    if (c.iterations_run > 0) {
      out << "  best_iter=" << c.best_iteration << "/" << c.iterations_run;
    }
    if (c.solver_jitter > 0.0) out << "  solver_jitter=" << format_param(c.solver_jitter);
    out << "\n";
  }
  out << "\nbest: " << best().params_label(method)
      << "  test_mse=" << format_param(best().test_mse) << "\n";
  return out.str();
}

std::string MetricReport::machine_lines() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellResult& c = cells[i];
    out << "method=" << method_name(method);
    if (!std::isnan(c.lambda)) out << " lambda=" << format_param(c.lambda);
    if (!std::isnan(c.gamma)) out << " gamma=" << format_param(c.gamma);
    if (!std::isnan(c.p)) out << " p=" << format_param(c.p);
    if (c.leaves > 0) out << " J=" << c.leaves;
    if (!std::isnan(c.nu)) out << " nu=" << format_param(c.nu);
    out << " train_mse=" << format_param(c.train_mse)
        << " test_mse=" << format_param(c.test_mse);
    if (c.iterations_run > 0) {
      out << " best_iteration=" << c.best_iteration
          << " iterations_run=" << c.iterations_run;
    }
    if (c.solver_jitter > 0.0) out << " solver_jitter=" << format_param(c.solver_jitter);
    out << " best=" << (i == best_cell ? 1 : 0) << "\n";
  }
  return out.str();
}

std::vector<std::string> MetricReport::write_files(
    const std::string& out_dir) const {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    written.push_back(path);
  };
  write("report.txt", human_table());
  write("cells.txt", machine_lines());
  write("report.json", to_json(true).dump(1, '\t') + "\n");
  return written;
}

namespace {

struct Prepared {
  ScalingParams scaling;
  Matrix x_train, x_test;
  Vector y_train, y_test;
};

Prepared prepare(const Dataset& train_raw, const Dataset& test_raw) {
  Prepared p;
  p.scaling = fit_scaling(train_raw.features);
  p.x_train = apply_scaling(train_raw.features, p.scaling);
  p.x_test = apply_scaling(test_raw.features, p.scaling);
  p.y_train = train_raw.targets;
  p.y_test = test_raw.targets;
  return p;
}

Dataset load_configured(const ExperimentConfig& config) {
  const TargetSelector selector = parse_target_selector(config.target);
  const bool has_header =
      config.has_header ? *config.has_header
                        : (std::holds_alternative<std::string>(selector)
                               ? true
                               : detect_header(config.data_path));
  return load_csv(config.data_path, selector, has_header);
}

// One kernel-parameter group: builds the train/test kernel matrices once and
// sweeps the lambda grid, writing cells [first, first + lambdas.size()).
void run_kernel_group(const ExperimentConfig& cfg, const Prepared& data,
                      const KernelSpec& spec, std::size_t first,
                      std::vector<CellResult>& cells) {
  const auto build_start = Clock::now();
  const Matrix K = kernel_matrix(data.x_train, data.x_train, spec);
  const Matrix Kt = kernel_matrix(data.x_test, data.x_train, spec);
  const double build_ms = elapsed_ms(build_start);
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    const auto cell_start = Clock::now();
    const double lambda = cfg.lambdas[li];
    KernelRidgeModel model = fit_kernel_ridge_precomputed(
        K, data.x_train, data.y_train, lambda, spec);
    CellResult& cell = cells[first + li];
    cell.lambda = lambda;
    if (spec.kind == KernelKind::Rbf) cell.gamma = spec.gamma;
    if (spec.kind == KernelKind::Pgmm) cell.p = spec.p;
    cell.train_mse = mean_squared_error(
        data.y_train, predict_kernel_ridge_precomputed(model, K));
    cell.test_mse = mean_squared_error(
        data.y_test, predict_kernel_ridge_precomputed(model, Kt));
    cell.solver_jitter = model.solve_info.jitter;
    cell.wall_ms = elapsed_ms(cell_start);
  }
  // The shared kernel build is charged to the group's first cell.
  cells[first].wall_ms += build_ms;
}

BoostOptions boost_options(const ExperimentConfig& cfg, double p, int J,
                           double nu) {
  BoostOptions opt;
  opt.p = p;
  opt.num_leaves = J;
  opt.shrinkage = nu;
  opt.max_iterations = cfg.max_iterations;
  opt.epsilon = cfg.epsilon;
  opt.min_leaf = cfg.min_leaf;
  opt.max_bins = cfg.max_bins;
  return opt;
}

void fill_boost_cell(const BoostModel& model, double p, int J, double nu,
                     CellResult& cell) {
  cell.p = p;
  cell.leaves = J;
  cell.nu = nu;
  cell.iterations_run = model.iterations_run;
  const auto it = std::min_element(model.eval_mse_history.begin(),
                                   model.eval_mse_history.end());
  cell.best_iteration =
      static_cast<int>(it - model.eval_mse_history.begin()) + 1;
  cell.test_mse = *it;
  cell.train_mse =
      model.train_mse_history[static_cast<std::size_t>(cell.best_iteration - 1)];
  cell.test_mse_final = model.eval_mse_history.back();
  cell.train_mse_final = model.train_mse_history.back();
  cell.test_mse_history = model.eval_mse_history;
  cell.train_mse_history = model.train_mse_history;
}

void run_boost_cell(const ExperimentConfig& cfg, const Prepared& data,
                    double p, int J, double nu, CellResult& cell) {
  const auto start = Clock::now();
  BoostModel model = fit_lp_boost(data.x_train, data.y_train,
                                  boost_options(cfg, p, J, nu), &data.x_test,
                                  &data.y_test);
  fill_boost_cell(model, p, J, nu, cell);
  cell.wall_ms = elapsed_ms(start);
}

}  // namespace

MetricReport run_experiment_on(const ExperimentConfig& config,
                               const Dataset& train_raw,
                               const Dataset& test_raw) {
  ExperimentConfig cfg = config;
  cfg.apply_defaults();
  if (cfg.train_count == 0) cfg.train_count = train_raw.rows();
  cfg.validate();

  const auto start = Clock::now();
  const Prepared data = prepare(train_raw, test_raw);
  const int workers = resolve_workers(cfg.workers);

  MetricReport report;
  report.method = cfg.method;
  report.dataset = cfg.data_path;
  report.n_train = train_raw.rows();
  report.n_test = test_raw.rows();
  report.dims = train_raw.dims();

  std::vector<std::function<void()>> jobs;
  switch (cfg.method) {
    case Method::LR: {
      report.cells.resize(cfg.lambdas.size());
      jobs.emplace_back([&cfg, &data, &report]() {
        for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
          const auto cell_start = Clock::now();
          const double lambda = cfg.lambdas[li];
          LinearRidgeModel model =
              fit_linear_ridge(data.x_train, data.y_train, lambda, true);
          CellResult& cell = report.cells[li];
          cell.lambda = lambda;
          cell.train_mse = mean_squared_error(
              data.y_train, predict_linear(model, data.x_train));
          cell.test_mse = mean_squared_error(
              data.y_test, predict_linear(model, data.x_test));
          cell.solver_jitter = model.solve_info.jitter;
          cell.wall_ms = elapsed_ms(cell_start);
        }
      });
      break;
    }
    case Method::RBF: {
      report.cells.resize(cfg.gammas.size() * cfg.lambdas.size());
      for (std::size_t gi = 0; gi < cfg.gammas.size(); ++gi) {
        const std::size_t first = gi * cfg.lambdas.size();
        const double gamma = cfg.gammas[gi];
        jobs.emplace_back([&cfg, &data, &report, gamma, first]() {
          run_kernel_group(cfg, data, KernelSpec::rbf(gamma), first,
                           report.cells);
        });
      }
      break;
    }
    case Method::GMM: {
      report.cells.resize(cfg.lambdas.size());
      jobs.emplace_back([&cfg, &data, &report]() {
        run_kernel_group(cfg, data, KernelSpec::gmm(), 0, report.cells);
      });
      break;
    }
    case Method::PGMM: {
      report.cells.resize(cfg.powers.size() * cfg.lambdas.size());
      for (std::size_t pi = 0; pi < cfg.powers.size(); ++pi) {
        const std::size_t first = pi * cfg.lambdas.size();
        const double p = cfg.powers[pi];
        jobs.emplace_back([&cfg, &data, &report, p, first]() {
          run_kernel_group(cfg, data, KernelSpec::pgmm(p), first,
                           report.cells);
        });
      }
      break;
    }
    case Method::LPBOOST: {
      report.cells.resize(cfg.powers.size() * cfg.leaves.size() *
                          cfg.shrinkages.size());
      std::size_t idx = 0;
      for (double p : cfg.powers) {
        for (int J : cfg.leaves) {
          for (double nu : cfg.shrinkages) {
            CellResult& cell = report.cells[idx++];
            jobs.emplace_back([&cfg, &data, &cell, p, J, nu]() {
              run_boost_cell(cfg, data, p, J, nu, cell);
            });
          }
        }
      }
      break;
    }
  }

  run_jobs(jobs, workers);

  report.best_cell = 0;
  for (std::size_t i = 1; i < report.cells.size(); ++i) {
    if (report.cells[i].test_mse < report.cells[report.best_cell].test_mse)
      report.best_cell = i;
  }
  report.total_wall_ms = elapsed_ms(start);
  return report;
}

MetricReport run_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.apply_defaults();
  cfg.validate();
  const Dataset all = load_configured(cfg);
  const auto parts = split(all, cfg.train_count, cfg.seed);
  MetricReport report = run_experiment_on(cfg, parts.first, parts.second);
  if (!cfg.out_dir.empty()) report.write_files(cfg.out_dir);
  return report;
}

SingleFit fit_single(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  auto one = [](const std::vector<double>& grid, const char* flag) {
    if (grid.size() != 1) {
      throw std::invalid_argument(std::string("fit expects exactly one value for ") + flag);
    }
    return grid[0];
  };

  cfg.validate();
  const Dataset all = load_configured(cfg);
  const auto parts = split(all, cfg.train_count, cfg.seed);
  const Prepared data = prepare(parts.first, parts.second);

  SingleFit fit;
  fit.n_train = parts.first.rows();
  fit.n_test = parts.second.rows();
  fit.cell.wall_ms = 0.0;
  const auto start = Clock::now();

  switch (cfg.method) {
    case Method::LR: {
      const double lambda = one(cfg.lambdas, "--lambda");
      LinearRidgeModel model =
          fit_linear_ridge(data.x_train, data.y_train, lambda, true);
      fit.cell.lambda = lambda;
      fit.cell.train_mse = mean_squared_error(
          data.y_train, predict_linear(model, data.x_train));
      fit.cell.test_mse = mean_squared_error(
          data.y_test, predict_linear(model, data.x_test));
      fit.cell.solver_jitter = model.solve_info.jitter;
      fit.model.model = std::move(model);
      break;
    }
    case Method::RBF:
    case Method::GMM:
    case Method::PGMM: {
      const double lambda = one(cfg.lambdas, "--lambda");
      KernelSpec spec = KernelSpec::gmm();
      if (cfg.method == Method::RBF) {
        spec = KernelSpec::rbf(one(cfg.gammas, "--gamma"));
        fit.cell.gamma = spec.gamma;
      } else if (cfg.method == Method::PGMM) {
        spec = KernelSpec::pgmm(one(cfg.powers, "--p"));
        fit.cell.p = spec.p;
      }
      KernelRidgeModel model =
          fit_kernel_ridge(data.x_train, data.y_train, lambda, spec);
      fit.cell.lambda = lambda;
      fit.cell.train_mse = mean_squared_error(
          data.y_train, predict_kernel_ridge(model, data.x_train));
      fit.cell.test_mse = mean_squared_error(
          data.y_test, predict_kernel_ridge(model, data.x_test));
      fit.cell.solver_jitter = model.solve_info.jitter;
      fit.model.model = std::move(model);
      break;
    }
    case Method::LPBOOST: {
      const double p = one(cfg.powers, "--p");
      if (cfg.leaves.size() != 1)
        throw std::invalid_argument("fit expects exactly one value for --J");
      const double nu = one(cfg.shrinkages, "--nu");
      BoostModel model =
          fit_lp_boost(data.x_train, data.y_train,
                       boost_options(cfg, p, cfg.leaves[0], nu), &data.x_test,
                       &data.y_test);
      fill_boost_cell(model, p, cfg.leaves[0], nu, fit.cell);
      fit.model.model = std::move(model);
      break;
    }
  }
  fit.model.scaling = data.scaling;
  fit.cell.wall_ms = elapsed_ms(start);
  return fit;
}

CurveKind parse_curve_kind(const std::string& name) {
  if (name == "mse_vs_lambda") return CurveKind::MseVsLambda;
  if (name == "mse_vs_p") return CurveKind::MseVsP;
  if (name == "mse_vs_iteration") return CurveKind::MseVsIteration;
  throw std::invalid_argument(
      "unknown curve kind '" + name +
      "' (expected mse_vs_lambda, mse_vs_p, or mse_vs_iteration)");
}

std::vector<std::string> emit_curves(const MetricReport& report,
                                     CurveKind kind,
                                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  auto open_file = [&](const std::string& name) {
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    written.push_back(path);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
  };

  switch (kind) {
    case CurveKind::MseVsLambda: {
      if (report.method == Method::LPBOOST) {
        throw std::invalid_argument("report has no lambda axis");
      }
      // Cells are laid out group-major with the lambda sweep innermost.
      std::vector<double> lambda_axis;
      for (const CellResult& c : report.cells) {
        if (!lambda_axis.empty() && c.lambda == lambda_axis.front()) break;
        lambda_axis.push_back(c.lambda);
      }
      const std::size_t n_lambda = lambda_axis.size();
      const std::size_t n_groups = report.cells.size() / n_lambda;
      auto out = open_file("mse_vs_lambda.txt");
      out << "# lambda";
      for (std::size_t g = 0; g < n_groups; ++g) {
        const CellResult& c = report.cells[g * n_lambda];
        if (report.method == Method::RBF) {
          out << "\tgamma=" << format_param(c.gamma);
        } else if (report.method == Method::PGMM) {
          out << "\tp=" << format_param(c.p);
        } else {
          out << "\t" << method_name(report.method);
        }
      }
      out << "\n";
      for (std::size_t li = 0; li < n_lambda; ++li) {
        out << format_param(lambda_axis[li]);
        for (std::size_t g = 0; g < n_groups; ++g) {
          out << "\t" << format_param(report.cells[g * n_lambda + li].test_mse);
        }
        out << "\n";
      }
      break;
    }
    case CurveKind::MseVsP: {
      if (report.method != Method::PGMM && report.method != Method::LPBOOST) {
        throw std::invalid_argument("report has no p axis");
      }
      // Best test MSE over all other parameters, for each fixed p.
      std::vector<double> axis;
      std::vector<double> best;
      for (const CellResult& c : report.cells) {
        if (axis.empty() || c.p != axis.back()) {
          axis.push_back(c.p);
          best.push_back(c.test_mse);
        } else {
          best.back() = std::min(best.back(), c.test_mse);
        }
      }
      const std::size_t best_row = static_cast<std::size_t>(
          std::min_element(best.begin(), best.end()) - best.begin());
      auto out = open_file("mse_vs_p.txt");
      out << "# p\tbest_test_mse\tis_best\n";
      for (std::size_t i = 0; i < axis.size(); ++i) {
        out << format_param(axis[i]) << "\t" << format_param(best[i]) << "\t"
            << (i == best_row ? 1 : 0) << "\n";
      }
      break;
    }
    case CurveKind::MseVsIteration: {
      if (report.method != Method::LPBOOST) {
        throw std::invalid_argument("report has no iteration axis");
      }
      for (const CellResult& c : report.cells) {
        auto out = open_file("mse_vs_iteration_p" + format_param(c.p) + "_J" +
                             std::to_string(c.leaves) + "_nu" +
                             format_param(c.nu) + ".txt");
        out << "# iteration\ttest_mse\ttrain_mse\n";
        for (std::size_t m = 0; m < c.test_mse_history.size(); ++m) {
          out << (m + 1) << "\t" << format_param(c.test_mse_history[m]) << "\t"
              << format_param(c.train_mse_history[m]) << "\n";
        }
      }
      break;
    }
  }
  return written;
}

}  // namespace pgmmboost
