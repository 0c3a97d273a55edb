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

#include "mia/features.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace mia {
namespace {

constexpr std::pair<FeatureKind, absl::string_view> kFeatureNames[] = {
    {FeatureKind::kTrueLabel, "true_label"},
    {FeatureKind::kPredictedLabel, "predicted_label"},
    {FeatureKind::kClassProbs, "class_probs"},
    {FeatureKind::kClassScaledProbs, "class_scaled_probs"},
    {FeatureKind::kLogits, "logits"},
    {FeatureKind::kClassScaledLogits, "class_scaled_logits"},
    {FeatureKind::kLoss, "loss"},
    {FeatureKind::kEntropy, "entropy"},
    {FeatureKind::kModifiedEntropy, "modified_entropy"},
};

constexpr absl::string_view kExtraPrefix = "extra:";

// Raw logits when the record has them, log-probabilities otherwise. Both
// agree up to a per-record additive constant.
std::vector<double> RecordLogits(const SampleRecord& record) {
  if (record.logits.has_value()) return *record.logits;
  std::vector<double> out(record.probs->size());
  std::transform(record.probs->begin(), record.probs->end(), out.begin(),
                 [](double p) { return std::log(p); });
  return out;
}

}  // namespace

std::string Feature::Name() const {
  if (kind == FeatureKind::kExtra) {
    return absl::StrCat(kExtraPrefix, extra_name);
  }
  for (const auto& [k, name] : kFeatureNames) {
    if (k == kind) return std::string(name);
  }
  return "unknown";
}

bool Feature::IsPerClass() const {
  return kind == FeatureKind::kClassProbs ||
         kind == FeatureKind::kClassScaledProbs ||
         kind == FeatureKind::kLogits ||
         kind == FeatureKind::kClassScaledLogits;
}

bool Feature::IsClassScaled() const {
  return kind == FeatureKind::kClassScaledProbs ||
         kind == FeatureKind::kClassScaledLogits;
}

absl::StatusOr<Feature> ParseFeature(absl::string_view name) {
  if (absl::ConsumePrefix(&name, kExtraPrefix)) {
    if (name.empty()) {
      return absl::InvalidArgumentError("empty extra feature name");
    }
    return Feature{FeatureKind::kExtra, std::string(name)};
  }
  for (const auto& [kind, known] : kFeatureNames) {
    if (known == name) return Feature{kind, ""};
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown feature '", name, "'"));
}

absl::StatusOr<FeatureSpec> FeatureSpec::Create(std::vector<Feature> features) {
  if (features.empty()) {
    return absl::InvalidArgumentError("feature spec is empty");
  }
  std::set<std::string> seen;
  for (const Feature& feature : features) {
    if (!seen.insert(feature.Name()).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate feature '", feature.Name(), "'"));
    }
  }
  return FeatureSpec(std::move(features));
}

absl::StatusOr<FeatureSpec> FeatureSpec::Parse(absl::string_view csv) {
  std::vector<Feature> features;
  for (absl::string_view token :
       absl::StrSplit(csv, ',', absl::SkipWhitespace())) {
    absl::StatusOr<Feature> feature =
        ParseFeature(absl::StripAsciiWhitespace(token));
    if (!feature.ok()) return feature.status();
    features.push_back(*std::move(feature));
  }
  return Create(std::move(features));
}

FeatureSpec FeatureSpec::Default() {
  return FeatureSpec({{FeatureKind::kTrueLabel, ""},
                      {FeatureKind::kPredictedLabel, ""},
                      {FeatureKind::kClassScaledProbs, ""},
                      {FeatureKind::kClassScaledLogits, ""},
                      {FeatureKind::kLoss, ""},
                      {FeatureKind::kModifiedEntropy, ""}});
}

std::vector<std::string> FeatureSpec::Names() const {
  std::vector<std::string> names;
  names.reserve(features_.size());
  for (const Feature& feature : features_) names.push_back(feature.Name());
  return names;
}

std::vector<std::vector<std::string>> FeatureSpec::CandidateSubsets() const {
  const std::vector<std::string> all = Names();
  std::vector<std::vector<std::string>> subsets = {all};
  if (all.size() < 2) return subsets;
  for (size_t drop = 0; drop < all.size(); ++drop) {
    std::vector<std::string> subset;
    for (size_t i = 0; i < all.size(); ++i) {
      if (i != drop) subset.push_back(all[i]);
    }
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

std::optional<size_t> FeatureMatrix::ColumnIndex(absl::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<size_t>(it - columns_.begin());
}

absl::StatusOr<std::vector<size_t>> FeatureMatrix::ColumnsForFeatures(
    std::span<const std::string> feature_names) const {
  std::vector<size_t> out;
  for (const std::string& name : feature_names) {
    if (std::find(column_features_.begin(), column_features_.end(), name) ==
        column_features_.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature '", name, "' not in matrix"));
    }
  }
  for (size_t c = 0; c < cols(); ++c) {
    if (std::find(feature_names.begin(), feature_names.end(),
                  column_features_[c]) != feature_names.end()) {
      out.push_back(c);
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const size_t> rows) const {
  FeatureMatrix out;
  out.columns_ = columns_;
  out.column_features_ = column_features_;
  out.class_scaled_ = class_scaled_;
  out.values_.reserve(rows.size() * cols());
  out.row_ids_.reserve(rows.size());
  out.row_labels_.reserve(rows.size());
  if (row_membership_.has_value()) {
    out.row_membership_.emplace();
    out.row_membership_->reserve(rows.size());
  }
  for (size_t r : rows) {
    const auto src = row(r);
    out.values_.insert(out.values_.end(), src.begin(), src.end());
    out.row_ids_.push_back(row_ids_[r]);
    out.row_labels_.push_back(row_labels_[r]);
    if (row_membership_.has_value()) {
      out.row_membership_->push_back((*row_membership_)[r]);
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::SelectColumnIndices(
    std::span<const size_t> cols) const {
  FeatureMatrix out;
  for (size_t c : cols) {
    out.columns_.push_back(columns_[c]);
    out.column_features_.push_back(column_features_[c]);
    out.class_scaled_.push_back(class_scaled_[c]);
  }
  out.values_.reserve(rows() * cols.size());
  for (size_t r = 0; r < rows(); ++r) {
    for (size_t c : cols) out.values_.push_back(at(r, c));
  }
  out.row_ids_ = row_ids_;
  out.row_labels_ = row_labels_;
  out.row_membership_ = row_membership_;
  return out;
}

absl::StatusOr<FeatureMatrix> FeatureMatrix::SelectColumns(
    std::span<const std::string> columns) const {
  std::vector<size_t> indices;
  indices.reserve(columns.size());
  for (const std::string& name : columns) {
    std::optional<size_t> index = ColumnIndex(name);
    if (!index.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing column '", name, "'"));
    }
    indices.push_back(*index);
  }
  return SelectColumnIndices(indices);
}

absl::StatusOr<FeatureMatrix> FeatureMatrix::Concat(
    const FeatureMatrix& top, const FeatureMatrix& bottom) {
  if (top.columns_ != bottom.columns_ ||
      top.class_scaled_ != bottom.class_scaled_) {
    return absl::InvalidArgumentError("column layouts differ");
  }
  if (top.has_membership() != bottom.has_membership()) {
    return absl::InvalidArgumentError("membership labels on one side only");
  }
  FeatureMatrix out = top;
  out.values_.insert(out.values_.end(), bottom.values_.begin(),
                     bottom.values_.end());
  out.row_ids_.insert(out.row_ids_.end(), bottom.row_ids_.begin(),
                      bottom.row_ids_.end());
  out.row_labels_.insert(out.row_labels_.end(), bottom.row_labels_.begin(),
                         bottom.row_labels_.end());
  if (out.row_membership_.has_value()) {
    out.row_membership_->insert(out.row_membership_->end(),
                                bottom.row_membership_->begin(),
                                bottom.row_membership_->end());
  }
  return out;
}

absl::StatusOr<FeatureMatrix> FeatureMatrix::FromParts(
    std::vector<std::string> columns, std::vector<std::string> features,
    std::vector<bool> class_scaled, std::vector<double> values,
    std::vector<std::string> row_ids, std::vector<int> row_labels,
    std::optional<std::vector<bool>> row_membership) {
  if (features.size() != columns.size() ||
      class_scaled.size() != columns.size()) {
    return absl::InvalidArgumentError("column metadata length mismatch");
  }
  if (row_labels.size() != row_ids.size() ||
      values.size() != row_ids.size() * columns.size() ||
      (row_membership.has_value() &&
       row_membership->size() != row_ids.size())) {
    return absl::InvalidArgumentError("matrix is not rectangular");
  }
  if (!std::all_of(values.begin(), values.end(),
                   [](double v) { return std::isfinite(v); })) {
    return absl::InvalidArgumentError("non-finite feature value");
  }
  FeatureMatrix out;
  out.columns_ = std::move(columns);
  out.column_features_ = std::move(features);
  out.class_scaled_ = std::move(class_scaled);
  out.values_ = std::move(values);
  out.row_ids_ = std::move(row_ids);
  out.row_labels_ = std::move(row_labels);
  out.row_membership_ = std::move(row_membership);
  return out;
}

double CrossEntropyLoss(std::span<const double> probs, int label) {
  return -std::log(probs[static_cast<size_t>(label)]);
}

double Entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) h -= p * std::log(p);
  return h;
}

double ModifiedEntropy(std::span<const double> probs, int label) {
  const size_t y = static_cast<size_t>(label);
  double h = -(1.0 - probs[y]) * std::log(probs[y]);
  for (size_t i = 0; i < probs.size(); ++i) {
    if (i != y) h -= probs[i] * std::log1p(-probs[i]);
  }
  return h;
}

int PredictedLabel(std::span<const double> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

absl::StatusOr<FeatureMatrix> BuildFeatureMatrix(const Dataset& dataset,
                                                 const FeatureSpec& spec) {
  const int num_classes = dataset.num_classes();
  FeatureMatrix m;
  for (const Feature& feature : spec.features()) {
    const std::string name = feature.Name();
    if (feature.IsPerClass()) {
      for (int k = 0; k < num_classes; ++k) {
        m.columns_.push_back(absl::StrCat(name, "[", k, "]"));
        m.column_features_.push_back(name);
        m.class_scaled_.push_back(feature.IsClassScaled());
      }
    } else {
      m.columns_.push_back(name);
      m.column_features_.push_back(name);
      m.class_scaled_.push_back(false);
    }
  }

  bool all_flagged = !dataset.empty();
  for (const SampleRecord& record : dataset.records()) {
    all_flagged &= record.member.has_value();
  }
  if (all_flagged) m.row_membership_.emplace();

  m.values_.reserve(dataset.size() * m.cols());
  for (const SampleRecord& record : dataset.records()) {
    if (!record.probs.has_value()) {
      return absl::FailedPreconditionError(
          absl::StrCat("record \"", record.id, "\" is not normalized"));
    }
    const std::vector<double>& probs = *record.probs;
    const int y = record.true_label;
    for (const Feature& feature : spec.features()) {
      switch (feature.kind) {
        case FeatureKind::kTrueLabel:
          m.values_.push_back(y);
          break;
        case FeatureKind::kPredictedLabel:
          m.values_.push_back(PredictedLabel(probs));
          break;
        case FeatureKind::kClassProbs:
        case FeatureKind::kClassScaledProbs:
          m.values_.insert(m.values_.end(), probs.begin(), probs.end());
          break;
        case FeatureKind::kLogits:
        case FeatureKind::kClassScaledLogits: {
          const std::vector<double> logits = RecordLogits(record);
          m.values_.insert(m.values_.end(), logits.begin(), logits.end());
          break;
        }
        case FeatureKind::kLoss:
          m.values_.push_back(CrossEntropyLoss(probs, y));
          break;
        case FeatureKind::kEntropy:
          m.values_.push_back(Entropy(probs));
          break;
        case FeatureKind::kModifiedEntropy:
          m.values_.push_back(ModifiedEntropy(probs, y));
          break;
        case FeatureKind::kExtra: {
          auto it = record.extra_features.find(feature.extra_name);
          if (it == record.extra_features.end()) {
            return absl::InvalidArgumentError(absl::StrCat(
                "record \"", record.id, "\" is missing extra feature '",
                feature.extra_name, "'"));
          }
          m.values_.push_back(it->second);
          break;
        }
      }
    }
    m.row_ids_.push_back(record.id);
    m.row_labels_.push_back(y);
    if (all_flagged) m.row_membership_->push_back(*record.member);
  }
  for (double v : m.values_) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("non-finite feature value");
    }
  }
  return m;
}

}  // namespace mia
