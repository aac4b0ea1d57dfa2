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

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "pgmmboost/boosting.hpp"
#include "pgmmboost/dataset.hpp"
#include "pgmmboost/ridge.hpp"

namespace pgmmboost {

class ModelIoError : public std::runtime_error {
 public:
  enum class Kind { Io, Format, Version };

  ModelIoError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

constexpr int kModelFormatVersion = 1;
constexpr const char* kModelFormatName = "pgmmboost-model";

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ModelIoError(ModelIoError::Kind::Format, "expected matrix array");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const Index cols = static_cast<Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols)
      throw ModelIoError(ModelIoError::Kind::Format, "ragged matrix rows");
    for (Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

inline nlohmann::json kernel_spec_to_json(const KernelSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.name();
  if (spec.kind == KernelKind::Rbf) j["gamma"] = spec.gamma;
  if (spec.kind == KernelKind::Pgmm) j["p"] = spec.p;
  return j;
}

inline KernelSpec kernel_spec_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return KernelSpec::linear();
  if (kind == "rbf") return KernelSpec::rbf(j.at("gamma").get<double>());
  if (kind == "gmm") return KernelSpec::gmm();
  if (kind == "pgmm") return KernelSpec::pgmm(j.at("p").get<double>());
  throw ModelIoError(ModelIoError::Kind::Format, "unknown kernel kind '" + kind + "'");
}

}  // namespace detail

/// A trained model paired with the feature scaling fitted alongside it, so a
/// reloaded model can predict directly from raw feature rows.
struct SavedModel {
  std::variant<LinearRidgeModel, KernelRidgeModel, BoostModel> model;
  std::optional<ScalingParams> scaling;

  std::string type() const {
    if (std::holds_alternative<LinearRidgeModel>(model)) return "linear_ridge";
    if (std::holds_alternative<KernelRidgeModel>(model)) return "kernel_ridge";
    return "lp_boost";
  }

  Vector predict(const Matrix& raw_features) const {
    const Matrix X =
        scaling ? apply_scaling(raw_features, *scaling) : raw_features;
    if (const auto* lin = std::get_if<LinearRidgeModel>(&model))
      return predict_linear(*lin, X);
    if (const auto* krr = std::get_if<KernelRidgeModel>(&model))
      return predict_kernel_ridge(*krr, X);
    return predict_boost(std::get<BoostModel>(model), X);
  }
};

inline void save_model(const SavedModel& saved, const std::string& path) {
  nlohmann::json j;
  j["format"] = kModelFormatName;
  j["version"] = kModelFormatVersion;
  j["type"] = saved.type();
  if (saved.scaling) {
    j["scaling"] = {{"min", detail::vector_to_json(saved.scaling->min)},
                    {"max", detail::vector_to_json(saved.scaling->max)}};
  }

  nlohmann::json body;
  if (const auto* lin = std::get_if<LinearRidgeModel>(&saved.model)) {
    body["weights"] = detail::vector_to_json(lin->weights);
    body["lambda"] = lin->lambda;
    body["has_intercept"] = lin->has_intercept;
  } else if (const auto* krr = std::get_if<KernelRidgeModel>(&saved.model)) {
    body["alpha"] = detail::vector_to_json(krr->alpha);
    body["lambda"] = krr->lambda;
    body["kernel"] = detail::kernel_spec_to_json(krr->spec);
    body["train_features"] = detail::matrix_to_json(krr->train_features);
  } else {
    const auto& boost = std::get<BoostModel>(saved.model);
    body["shrinkage"] = boost.shrinkage;
    body["p"] = boost.p;
    body["iterations_run"] = boost.iterations_run;
    body["binner"] = {{"max_bins", boost.binner.max_bins},
                      {"boundaries", boost.binner.boundaries}};
    nlohmann::json trees = nlohmann::json::array();
    for (const RegressionTree& tree : boost.trees) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const TreeNode& nd : tree.nodes) {
        nodes.push_back({{"f", nd.feature},
                         {"t", nd.threshold},
                         {"l", nd.left},
                         {"r", nd.right},
                         {"v", nd.value}});
      }
      trees.push_back({{"nodes", std::move(nodes)},
                       {"leaves", tree.leaf_count}});
    }
    body["trees"] = std::move(trees);
    body["train_lp_history"] = boost.train_lp_history;
    body["train_mse_history"] = boost.train_mse_history;
    body["eval_mse_history"] = boost.eval_mse_history;
  }
  j["model"] = std::move(body);

  std::ofstream out(path);
  if (!out) throw ModelIoError(ModelIoError::Kind::Io, "cannot write " + path);
  out << j.dump(1, '\t') << '\n';
  if (!out) throw ModelIoError(ModelIoError::Kind::Io, "write failure: " + path);
}

inline SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelIoError(ModelIoError::Kind::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelIoError(ModelIoError::Kind::Format,
                       "malformed or truncated model file: " + std::string(e.what()));
  }

  try {
    if (!j.is_object() || j.value("format", "") != kModelFormatName) {
      throw ModelIoError(ModelIoError::Kind::Format,
                         "not a " + std::string(kModelFormatName) + " file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelIoError(ModelIoError::Kind::Version,
                         "incompatible model version " + std::to_string(version) +
                             " (expected " + std::to_string(kModelFormatVersion) + ")");
    }

    SavedModel saved;
    if (j.contains("scaling")) {
      ScalingParams scaling;
      scaling.min = detail::vector_from_json(j["scaling"].at("min"));
      scaling.max = detail::vector_from_json(j["scaling"].at("max"));
      saved.scaling = std::move(scaling);
    }

    const std::string type = j.at("type").get<std::string>();
    const nlohmann::json& body = j.at("model");
    if (type == "linear_ridge") {
      LinearRidgeModel lin;
      lin.weights = detail::vector_from_json(body.at("weights"));
      lin.lambda = body.at("lambda").get<double>();
      lin.has_intercept = body.at("has_intercept").get<bool>();
      saved.model = std::move(lin);
    } else if (type == "kernel_ridge") {
      KernelRidgeModel krr;
      krr.alpha = detail::vector_from_json(body.at("alpha"));
      krr.lambda = body.at("lambda").get<double>();
      krr.spec = detail::kernel_spec_from_json(body.at("kernel"));
      krr.train_features = detail::matrix_from_json(body.at("train_features"));
      saved.model = std::move(krr);
    } else if (type == "lp_boost") {
      BoostModel boost;
      boost.shrinkage = body.at("shrinkage").get<double>();
      boost.p = body.at("p").get<double>();
      boost.iterations_run = body.at("iterations_run").get<int>();
      boost.binner.max_bins = body.at("binner").at("max_bins").get<int>();
      boost.binner.boundaries =
          body.at("binner").at("boundaries").get<std::vector<std::vector<double>>>();
      for (const auto& tj : body.at("trees")) {
        RegressionTree tree;
        tree.leaf_count = tj.at("leaves").get<int>();
        for (const auto& nj : tj.at("nodes")) {
          TreeNode nd;
          nd.feature = nj.at("f").get<int>();
          nd.threshold = nj.at("t").get<int>();
          nd.left = nj.at("l").get<int>();
          nd.right = nj.at("r").get<int>();
          nd.value = nj.at("v").get<double>();
          tree.nodes.push_back(nd);
        }
        boost.trees.push_back(std::move(tree));
      }
      boost.train_lp_history =
          body.at("train_lp_history").get<std::vector<double>>();
      boost.train_mse_history =
          body.at("train_mse_history").get<std::vector<double>>();
      boost.eval_mse_history =
          body.at("eval_mse_history").get<std::vector<double>>();
      saved.model = std::move(boost);
    } else {
      throw ModelIoError(ModelIoError::Kind::Format, "unknown model type '" + type + "'");
    }
    return saved;
  } catch (const nlohmann::json::exception& e) {
    throw ModelIoError(ModelIoError::Kind::Format,
                       "invalid model file: " + std::string(e.what()));
  }
}

}  // namespace pgmmboost
