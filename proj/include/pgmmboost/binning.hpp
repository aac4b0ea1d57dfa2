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
#include <stdexcept>
#include <vector>

#include "pgmmboost/types.hpp"

namespace pgmmboost {

/// Per-feature adaptive quantization of raw values into small integer codes.
/// `boundaries[j]` holds the strictly increasing bin upper bounds of feature
/// j; the code of a value is the index of the first boundary >= value,
/// clamped to the last bin. The map is monotone: x <= y implies
/// code(x) <= code(y).
struct Binner {
  std::vector<std::vector<double>> boundaries;
  int max_bins = 255;

  Index dims() const { return static_cast<Index>(boundaries.size()); }
  int bins(Index feature) const {
    return static_cast<int>(boundaries[static_cast<std::size_t>(feature)].size());
  }
};

/// Builds quantile-adaptive bins from the empirical distribution of each
/// feature. Features with at most `max_bins` distinct values get one exact
/// bin per value; larger cardinalities are cut at equal-population ranks of
/// the sorted sample, which makes the resulting codes invariant under any
/// strictly increasing transform of the feature.
inline Binner build_bins(const Matrix& X, int max_bins = 255) {
  if (max_bins < 2) throw std::invalid_argument("build_bins: max_bins must be >= 2");
  Binner binner;
  binner.max_bins = max_bins;
  binner.boundaries.resize(static_cast<std::size_t>(X.cols()));
  const std::size_t n = static_cast<std::size_t>(X.rows());

  std::vector<double> vals(n);
  for (Index j = 0; j < X.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) vals[i] = X(static_cast<Index>(i), j);
    std::sort(vals.begin(), vals.end());

    std::vector<double> distinct;
    for (double v : vals) {
      if (distinct.empty() || v > distinct.back()) distinct.push_back(v);
    }

    auto& bounds = binner.boundaries[static_cast<std::size_t>(j)];
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      bounds = std::move(distinct);
    } else {
      // Rank-based cuts: boundary b is the sample value at rank b*n/max_bins.
      bounds.reserve(static_cast<std::size_t>(max_bins));
      for (int b = 1; b <= max_bins; ++b) {
        const std::size_t rank =
            static_cast<std::size_t>(b) * n / static_cast<std::size_t>(max_bins);
        const double cut = vals[rank - 1];
        if (bounds.empty() || cut > bounds.back()) bounds.push_back(cut);
      }
    }
  }
  return binner;
}

inline int bin_code(const std::vector<double>& bounds, double value) {
  const auto it = std::lower_bound(bounds.begin(), bounds.end(), value);
  if (it == bounds.end()) return static_cast<int>(bounds.size()) - 1;
  return static_cast<int>(it - bounds.begin());
}

inline CodeMatrix apply_bins(const Matrix& X, const Binner& binner) {
  if (X.cols() != binner.dims())
    throw std::invalid_argument("apply_bins: dimension mismatch");
  CodeMatrix codes(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const auto& bounds = binner.boundaries[static_cast<std::size_t>(j)];
    for (Index i = 0; i < X.rows(); ++i) {
      codes(i, j) = bin_code(bounds, X(i, j));
    }
  }
  return codes;
}

}  // namespace pgmmboost
