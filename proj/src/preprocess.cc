// Copyright 2026 The MIA Ensemble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mia/preprocess.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace mia {

absl::string_view ScalerKindName(ScalerKind kind) {
  switch (kind) {
    case ScalerKind::kMinMax:
      return "minmax";
    case ScalerKind::kStandard:
      return "standard";
    case ScalerKind::kRobust:
      return "robust";
    case ScalerKind::kIdentity:
      return "identity";
  }
  return "identity";
}

absl::StatusOr<ScalerKind> ParseScalerKind(absl::string_view name) {
  for (ScalerKind kind : {ScalerKind::kMinMax, ScalerKind::kStandard,
                          ScalerKind::kRobust, ScalerKind::kIdentity}) {
    if (ScalerKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown scaler '", name,
                   "' (expected robust|minmax|standard|identity)"));
}

double Quantile(std::span<const double> sorted, double q) {
  const double rank = static_cast<double>(sorted.size() - 1) * q;
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ColumnStatistics ComputeStatistics(ScalerKind kind,
                                   std::span<const double> column) {
  switch (kind) {
    case ScalerKind::kMinMax: {
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      return {*lo, *hi - *lo};
    }
    case ScalerKind::kStandard: {
      const double n = static_cast<double>(column.size());
      const double mean =
          std::accumulate(column.begin(), column.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : column) ss += (v - mean) * (v - mean);
      return {mean, std::sqrt(ss / n)};
    }
    case ScalerKind::kRobust: {
      std::vector<double> sorted(column.begin(), column.end());
      std::sort(sorted.begin(), sorted.end());
      return {Quantile(sorted, 0.5),
              Quantile(sorted, 0.75) - Quantile(sorted, 0.25)};
    }
    case ScalerKind::kIdentity:
      return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

absl::StatusOr<FittedScaler> FitScaler(const ScalerSpec& spec,
                                       const FeatureMatrix& train) {
  if (train.rows() == 0) {
    return absl::InvalidArgumentError("cannot fit a scaler on an empty matrix");
  }
  FittedScaler scaler;
  scaler.spec = spec;
  scaler.columns = train.columns();
  scaler.class_scaled = train.class_scaled();
  const size_t cols = train.cols();

  std::vector<double> column(train.rows());
  scaler.global.reserve(cols);
  for (size_t c = 0; c < cols; ++c) {
    for (size_t r = 0; r < train.rows(); ++r) column[r] = train.at(r, c);
    scaler.global.push_back(ComputeStatistics(spec.kind, column));
  }

  const bool any_class_scaled =
      std::find(scaler.class_scaled.begin(), scaler.class_scaled.end(), true) !=
      scaler.class_scaled.end();
  if (spec.per_class && any_class_scaled &&
      spec.kind != ScalerKind::kIdentity) {
    std::map<int, std::vector<size_t>> groups;
    for (size_t r = 0; r < train.rows(); ++r) {
      groups[train.row_labels()[r]].push_back(r);
    }
    for (const auto& [label, rows] : groups) {
      std::vector<ColumnStatistics> stats = scaler.global;
      std::vector<double> group_column(rows.size());
      for (size_t c = 0; c < cols; ++c) {
        if (!scaler.class_scaled[c]) continue;
        for (size_t i = 0; i < rows.size(); ++i) {
          group_column[i] = train.at(rows[i], c);
        }
        stats[c] = ComputeStatistics(spec.kind, group_column);
      }
      scaler.per_class.emplace(label, std::move(stats));
    }
  }
  return scaler;
}

absl::StatusOr<FeatureMatrix> ApplyScaler(const FittedScaler& scaler,
                                          const FeatureMatrix& m) {
  if (m.columns() != scaler.columns) {
    return absl::InvalidArgumentError(
        "scaler columns do not match the matrix columns");
  }
  FeatureMatrix out = m;
  if (scaler.spec.kind == ScalerKind::kIdentity) return out;
  for (size_t r = 0; r < out.rows(); ++r) {
    const std::vector<ColumnStatistics>* stats = &scaler.global;
    if (!scaler.per_class.empty()) {
      auto it = scaler.per_class.find(out.row_labels()[r]);
      if (it != scaler.per_class.end()) stats = &it->second;
    }
    for (size_t c = 0; c < out.cols(); ++c) {
      const ColumnStatistics& s = (*stats)[c];
      out.at(r, c) = (out.at(r, c) - s.location) / s.divisor();
    }
  }
  return out;
}

}  // namespace mia
