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

#ifndef MIA_PREPROCESS_H_
#define MIA_PREPROCESS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mia/features.h"

namespace mia {

enum class ScalerKind { kMinMax, kStandard, kRobust, kIdentity };

absl::string_view ScalerKindName(ScalerKind kind);
absl::StatusOr<ScalerKind> ParseScalerKind(absl::string_view name);

struct ScalerSpec {
  ScalerKind kind = ScalerKind::kRobust;
  // Class-scaled columns use statistics of the row's true-label group.
  bool per_class = true;

  friend bool operator==(const ScalerSpec&, const ScalerSpec&) = default;
};

// Location and spread of one column: (min, max - min), (mean, population
// std) or (median, IQR) depending on the kind. A zero spread divides by 1.
struct ColumnStatistics {
  double location = 0.0;
  double spread = 1.0;

  double divisor() const { return spread > 0.0 ? spread : 1.0; }
  friend bool operator==(const ColumnStatistics&,
                         const ColumnStatistics&) = default;
};

struct FittedScaler {
  ScalerSpec spec;
  std::vector<std::string> columns;
  std::vector<bool> class_scaled;
  // Statistics over all training rows; also the fallback for labels unseen
  // at fit time.
  std::vector<ColumnStatistics> global;
  // Per true label, one entry per column (meaningful for class-scaled
  // columns only). Empty unless spec.per_class.
  std::map<int, std::vector<ColumnStatistics>> per_class;

  friend bool operator==(const FittedScaler&, const FittedScaler&) = default;
};

// Linear interpolation at fractional rank (n - 1) * q of sorted data.
double Quantile(std::span<const double> sorted, double q);

ColumnStatistics ComputeStatistics(ScalerKind kind,
                                   std::span<const double> column);

absl::StatusOr<FittedScaler> FitScaler(const ScalerSpec& spec,
                                       const FeatureMatrix& train);

// Transformed copy of `m`. Values are not clipped to the fit range.
absl::StatusOr<FeatureMatrix> ApplyScaler(const FittedScaler& scaler,
                                          const FeatureMatrix& m);

}  // namespace mia

#endif  // MIA_PREPROCESS_H_
