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
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pgmmboost/types.hpp"

namespace pgmmboost {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense regression dataset: an n x d feature matrix plus a length-n target
/// vector. All entries are finite; construction via load_csv enforces this.
struct Dataset {
  Matrix features;
  Vector targets;
  std::vector<std::string> feature_names;  // empty or exactly d names
  std::string target_name = "target";

  Index rows() const { return features.rows(); }
  Index dims() const { return features.cols(); }
};

// Target column addressed either by header name or by zero-based index.
using TargetSelector = std::variant<std::string, int>;

inline TargetSelector parse_target_selector(const std::string& text) {
  if (!text.empty() &&
      text.find_first_not_of("0123456789") == std::string::npos) {
    return TargetSelector(std::stoi(text));
  }
  return TargetSelector(text);
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

/// Reads a comma-separated file with an optional single header row and
/// extracts `target` as the regression target; the remaining columns form
/// the feature matrix, row order preserved. Parse failures report the
/// 1-based data row and column of the offending field.
inline Dataset load_csv(const std::string& path, const TargetSelector& target,
                        bool has_header) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open file: " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw DatasetError("empty file: " + path);

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (has_header) {
    header = detail::split_fields(lines[0]);
    first_data = 1;
    if (lines.size() == 1) throw DatasetError("no data rows in " + path);
  }

  const std::size_t num_cols =
      detail::split_fields(lines[first_data]).size();
  if (has_header && header.size() != num_cols) {
    throw DatasetError("header has " + std::to_string(header.size()) +
                       " fields but data rows have " +
                       std::to_string(num_cols));
  }

  int target_col = -1;
  if (std::holds_alternative<int>(target)) {
    target_col = std::get<int>(target);
    if (target_col < 0 || target_col >= static_cast<int>(num_cols)) {
      throw DatasetError("target column index " + std::to_string(target_col) +
                         " out of range for " + std::to_string(num_cols) +
                         " columns");
    }
  } else {
    const std::string& name = std::get<std::string>(target);
    if (!has_header) {
      throw DatasetError("target column '" + name +
                         "' requires a header row");
    }
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DatasetError("target column '" + name + "' not found in header");
    }
    target_col = static_cast<int>(it - header.begin());
  }
  if (num_cols < 2) throw DatasetError("no features remain after removing the target column");

  const std::size_t n = lines.size() - first_data;
  const std::size_t d = num_cols - 1;
  Dataset ds;
  ds.features.resize(static_cast<Index>(n), static_cast<Index>(d));
  ds.targets.resize(static_cast<Index>(n));
  if (has_header) {
    ds.target_name = header[static_cast<std::size_t>(target_col)];
    for (std::size_t c = 0; c < num_cols; ++c) {
      if (static_cast<int>(c) != target_col)
        ds.feature_names.push_back(header[c]);
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    auto fields = detail::split_fields(lines[first_data + r]);
    if (fields.size() != num_cols) {
      throw DatasetError("row " + std::to_string(r + 1) + " has " +
                         std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(num_cols));
    }
    Index fc = 0;
    for (std::size_t c = 0; c < num_cols; ++c) {
      double value = 0.0;
      if (!parse_double(fields[c], value)) {
        throw DatasetError("parse error at row " + std::to_string(r + 1) +
                           ", column " + std::to_string(c + 1) + ": '" +
                           fields[c] + "'");
      }
      if (static_cast<int>(c) == target_col) {
        ds.targets[static_cast<Index>(r)] = value;
      } else {
        ds.features(static_cast<Index>(r), fc++) = value;
      }
    }
  }
  return ds;
}

/// Feature-only variant for prediction inputs without a target column.
inline Matrix load_features_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    lines.push_back(line);
  }
  std::size_t first_data = has_header ? 1 : 0;
  if (lines.size() <= first_data) throw DatasetError("no data rows in " + path);
  const std::size_t num_cols = detail::split_fields(lines[first_data]).size();
  Matrix X(static_cast<Index>(lines.size() - first_data),
           static_cast<Index>(num_cols));
  for (std::size_t r = first_data; r < lines.size(); ++r) {
    auto fields = detail::split_fields(lines[r]);
    if (fields.size() != num_cols) {
      throw DatasetError("row " + std::to_string(r - first_data + 1) +
                         " has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(num_cols));
    }
    for (std::size_t c = 0; c < num_cols; ++c) {
      double value = 0.0;
      if (!parse_double(fields[c], value)) {
        throw DatasetError("parse error at row " +
                           std::to_string(r - first_data + 1) + ", column " +
                           std::to_string(c + 1) + ": '" + fields[c] + "'");
      }
      X(static_cast<Index>(r - first_data), static_cast<Index>(c)) = value;
    }
  }
  return X;
}

/// Writes the dataset back out as CSV, features first and the target last.
/// Values use the shortest round-tripping decimal form, so a load/save/load
/// cycle is value-identical.
inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write file: " + path);
  const Index d = ds.dims();
  if (!ds.feature_names.empty()) {
    for (Index j = 0; j < d; ++j) out << ds.feature_names[static_cast<std::size_t>(j)] << ',';
    out << ds.target_name << '\n';
  }
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < d; ++j) out << format_double(ds.features(i, j)) << ',';
    out << format_double(ds.targets[i]) << '\n';
  }
  if (!out) throw DatasetError("write failure: " + path);
}

/// Per-feature affine rescaling statistics; fitted on training data only.
struct ScalingParams {
  Vector min;
  Vector max;

  Index dims() const { return min.size(); }
};

inline ScalingParams fit_scaling(const Matrix& train_features) {
  if (train_features.rows() < 1) throw DatasetError("fit_scaling on empty data");
  ScalingParams p;
  p.min = train_features.colwise().minCoeff();
  p.max = train_features.colwise().maxCoeff();
  return p;
}

inline ScalingParams fit_scaling(const Dataset& train) {
  return fit_scaling(train.features);
}

/// Maps x to (x - min) / (max - min) per column. Columns that were constant
/// during fitting map to 0. Values outside the fitted range are not clamped.
inline Matrix apply_scaling(const Matrix& X, const ScalingParams& params) {
  if (X.cols() != params.dims()) {
    throw DatasetError("apply_scaling: dimension mismatch (" +
                       std::to_string(X.cols()) + " vs " +
                       std::to_string(params.dims()) + ")");
  }
  Matrix out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double span = params.max[j] - params.min[j];
    if (span == 0.0) {
      out.col(j).setZero();
    } else {
      out.col(j) = (X.col(j).array() - params.min[j]) / span;
    }
  }
  return out;
}

inline Dataset apply_scaling(const Dataset& ds, const ScalingParams& params) {
  Dataset out = ds;
  out.features = apply_scaling(ds.features, params);
  return out;
}

/// Deterministic shuffled partition: the same seed always produces the same
/// (train, test) pair, independent of platform.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, Index train_count,
                                         std::uint64_t seed) {
  const Index n = ds.rows();
  if (train_count < 1 || train_count >= n) {
    throw DatasetError("train_count " + std::to_string(train_count) +
                       " out of range for " + std::to_string(n) + " rows");
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index(0));
  // Explicit Fisher-Yates; std::shuffle's draw sequence is
  // implementation-defined and would break cross-platform determinism.
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  auto take = [&](Index begin, Index count) {
    Dataset part;
    part.features.resize(count, ds.dims());
    part.targets.resize(count);
    part.feature_names = ds.feature_names;
    part.target_name = ds.target_name;
    for (Index i = 0; i < count; ++i) {
      const Index src = perm[static_cast<std::size_t>(begin + i)];
      part.features.row(i) = ds.features.row(src);
      part.targets[i] = ds.targets[src];
    }
    return part;
  };
  return {take(0, train_count), take(train_count, n - train_count)};
}

}  // namespace pgmmboost
