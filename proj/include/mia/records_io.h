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

// Line-delimited interchange format for per-sample target-model outputs.
//
// Each line is one JSON object:
//   {"id": "a", "true_label": 0, "probs": [0.9, 0.1], "logits": [...],
//    "extra_features": {"ppl_choice_0": 3.2}, "member": true}
// At least one of probs/logits is required. Records are normalized on load so
// every record carries clamped probabilities.

#ifndef MIA_RECORDS_IO_H_
#define MIA_RECORDS_IO_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace mia {

// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before any
// feature takes a log.
inline constexpr double kProbEpsilon = 1e-12;
inline constexpr double kProbSumTolerance = 1e-6;

struct SampleRecord {
  std::string id;
  int true_label = 0;
  std::optional<std::vector<double>> probs;
  std::optional<std::vector<double>> logits;
  std::map<std::string, double> extra_features;
  std::optional<bool> member;

  // Length of the score vector (probs, else logits).
  int NumClasses() const;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Immutable, validated collection of records with a uniform class count.
class Dataset {
 public:
  // Validates every record and the cross-record invariants, then normalizes.
  static absl::StatusOr<Dataset> Create(std::vector<SampleRecord> records);

  const std::vector<SampleRecord>& records() const { return records_; }
  const SampleRecord& operator[](size_t i) const { return records_[i]; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  int num_classes() const { return num_classes_; }

  // Records whose true label is in `labels`; may be empty.
  Dataset FilterByLabel(std::span<const int> labels) const;
  // Copy with every record's member flag set to `member`.
  Dataset WithMembership(bool member) const;

 private:
  Dataset(std::vector<SampleRecord> records, int num_classes)
      : records_(std::move(records)), num_classes_(num_classes) {}

  std::vector<SampleRecord> records_;
  int num_classes_ = 0;
};

// Per-record invariants (score vectors, label range). Does not normalize.
absl::Status ValidateRecord(const SampleRecord& record);

// Fills probs from logits (stable softmax) when absent, then clamps to
// [kProbEpsilon, 1 - kProbEpsilon] and renormalizes if anything was clamped.
// Idempotent.
SampleRecord NormalizeRecord(SampleRecord record);

std::vector<double> Softmax(std::span<const double> logits);

absl::StatusOr<SampleRecord> ParseRecordLine(absl::string_view line);
std::string FormatRecordLine(const SampleRecord& record);

// Errors carry the 1-based line number of the offending line.
absl::StatusOr<Dataset> LoadRecords(const std::string& path);
absl::Status WriteRecords(std::span<const SampleRecord> records,
                          const std::string& path);

// Two-file audit input: membership flags come from the file a record is in
// and override any per-record `member` field.
absl::StatusOr<std::pair<Dataset, Dataset>> LoadMembershipPair(
    const std::string& members_path, const std::string& nonmembers_path);

// Single-file audit input: every record must carry a `member` flag.
absl::StatusOr<std::pair<Dataset, Dataset>> SplitByMembership(
    const Dataset& dataset);

}  // namespace mia

#endif  // MIA_RECORDS_IO_H_
