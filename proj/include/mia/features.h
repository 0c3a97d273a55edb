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

#ifndef MIA_FEATURES_H_
#define MIA_FEATURES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mia/records_io.h"

namespace mia {

enum class FeatureKind {
  kTrueLabel,
  kPredictedLabel,
  kClassProbs,
  kClassScaledProbs,
  kLogits,
  kClassScaledLogits,
  kLoss,
  kEntropy,
  kModifiedEntropy,
  kExtra,
};

struct Feature {
  FeatureKind kind = FeatureKind::kLoss;
  std::string extra_name;  // only for kExtra

  // Stable name: "loss", "class_scaled_probs", "extra:ppl_choice_0", ...
  std::string Name() const;
  // Per-class vector features expand to one column per class.
  bool IsPerClass() const;
  // Columns produced by this feature are scaled per true-class group.
  bool IsClassScaled() const;

  friend bool operator==(const Feature&, const Feature&) = default;
};

absl::StatusOr<Feature> ParseFeature(absl::string_view name);

// Ordered, non-empty set of features with unique names.
class FeatureSpec {
 public:
  static absl::StatusOr<FeatureSpec> Create(std::vector<Feature> features);
  // Comma-separated feature names.
  static absl::StatusOr<FeatureSpec> Parse(absl::string_view csv);
  // true labels, predicted labels, class-scaled probabilities, class-scaled
  // logits, losses, modified entropy.
  static FeatureSpec Default();

  const std::vector<Feature>& features() const { return features_; }
  size_t size() const { return features_.size(); }
  std::vector<std::string> Names() const;

  // Candidate subsets searched per run: the full set followed by every
  // leave-one-out subset (in spec order). A single-feature spec yields
  // only itself.
  std::vector<std::vector<std::string>> CandidateSubsets() const;

 private:
  explicit FeatureSpec(std::vector<Feature> features)
      : features_(std::move(features)) {}
  std::vector<Feature> features_;
};

// Rectangular matrix of attack features, one row per record.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  size_t rows() const { return row_ids_.size(); }
  size_t cols() const { return columns_.size(); }
  double at(size_t row, size_t col) const {
    return values_[row * cols() + col];
  }
  double& at(size_t row, size_t col) { return values_[row * cols() + col]; }
  std::span<const double> row(size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<const double> values() const { return values_; }

  const std::vector<std::string>& columns() const { return columns_; }
  // Name of the feature each column was expanded from.
  const std::vector<std::string>& column_features() const {
    return column_features_;
  }
  const std::vector<bool>& class_scaled() const { return class_scaled_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<int>& row_labels() const { return row_labels_; }
  const std::optional<std::vector<bool>>& row_membership() const {
    return row_membership_;
  }
  bool has_membership() const { return row_membership_.has_value(); }

  std::optional<size_t> ColumnIndex(absl::string_view name) const;

  // Column indices of every column expanded from one of `feature_names`,
  // in matrix order.
  absl::StatusOr<std::vector<size_t>> ColumnsForFeatures(
      std::span<const std::string> feature_names) const;

  FeatureMatrix SelectRows(std::span<const size_t> rows) const;
  absl::StatusOr<FeatureMatrix> SelectColumns(
      std::span<const std::string> columns) const;
  FeatureMatrix SelectColumnIndices(std::span<const size_t> cols) const;

  // Row-wise concatenation; column layouts must match.
  static absl::StatusOr<FeatureMatrix> Concat(const FeatureMatrix& top,
                                              const FeatureMatrix& bottom);

  // Low-level constructor used by tests and deserialization.
  static absl::StatusOr<FeatureMatrix> FromParts(
      std::vector<std::string> columns, std::vector<std::string> features,
      std::vector<bool> class_scaled, std::vector<double> values,
      std::vector<std::string> row_ids, std::vector<int> row_labels,
      std::optional<std::vector<bool>> row_membership);

 private:
  friend absl::StatusOr<FeatureMatrix> BuildFeatureMatrix(
      const Dataset& dataset, const FeatureSpec& spec);

  std::vector<std::string> columns_;
  std::vector<std::string> column_features_;
  std::vector<bool> class_scaled_;
  std::vector<double> values_;
  std::vector<std::string> row_ids_;
  std::vector<int> row_labels_;
  std::optional<std::vector<bool>> row_membership_;
};

// -ln(probs[label]).
double CrossEntropyLoss(std::span<const double> probs, int label);
// -sum_i p_i ln p_i.
double Entropy(std::span<const double> probs);
// -(1 - p_y) ln p_y - sum_{i != y} p_i ln(1 - p_i).
double ModifiedEntropy(std::span<const double> probs, int label);
// Argmax, lowest index on ties.
int PredictedLabel(std::span<const double> probs);

// All records must be normalized (Dataset guarantees this). Membership flags
// are copied when every record carries one.
absl::StatusOr<FeatureMatrix> BuildFeatureMatrix(const Dataset& dataset,
                                                 const FeatureSpec& spec);

}  // namespace mia

#endif  // MIA_FEATURES_H_
