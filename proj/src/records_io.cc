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

#include "mia/records_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "mia/json_text.h"

namespace mia {
namespace {

absl::StatusOr<std::vector<double>> ReadRealArray(const Json& value,
                                                  absl::string_view field) {
  if (!value.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", field, "' must be an array of numbers"));
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", field, "' must be an array of numbers"));
    }
    out.push_back(item.get<double>());
  }
  return out;
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

int SampleRecord::NumClasses() const {
  if (probs.has_value()) return static_cast<int>(probs->size());
  if (logits.has_value()) return static_cast<int>(logits->size());
  return 0;
}

absl::Status ValidateRecord(const SampleRecord& record) {
  if (!record.probs.has_value() && !record.logits.has_value()) {
    return absl::InvalidArgumentError("record has neither probs nor logits");
  }
  if (record.probs.has_value() && record.logits.has_value() &&
      record.probs->size() != record.logits->size()) {
    return absl::InvalidArgumentError("probs and logits lengths differ");
  }
  if (record.probs.has_value()) {
    double sum = 0.0;
    for (double p : *record.probs) {
      if (!(p >= 0.0 && p <= 1.0)) {
        return absl::InvalidArgumentError("probability outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("probs sum to ", sum, ", not 1"));
    }
  }
  if (record.logits.has_value() && !AllFinite(*record.logits)) {
    return absl::InvalidArgumentError("non-finite logit");
  }
  for (const auto& [name, value] : record.extra_features) {
    if (!std::isfinite(value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite extra feature '", name, "'"));
    }
  }
  const int num_classes = record.NumClasses();
  if (num_classes < 2) {
    return absl::InvalidArgumentError("at least two classes are required");
  }
  if (record.true_label < 0 || record.true_label >= num_classes) {
    return absl::InvalidArgumentError(
        absl::StrCat("label out of range: ", record.true_label, " with ",
                     num_classes, " classes"));
  }
  return absl::OkStatus();
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

SampleRecord NormalizeRecord(SampleRecord record) {
  if (!record.probs.has_value()) {
    if (!record.logits.has_value()) return record;
    record.probs = Softmax(*record.logits);
  }
  std::vector<double>& probs = *record.probs;
  auto clamp = [&probs] {
    bool changed = false;
    for (double& p : probs) {
      const double c = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
      changed |= c != p;
      p = c;
    }
    return changed;
  };
  if (clamp()) {
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& p : probs) p /= sum;
    // Renormalizing can nudge a clamped entry back below epsilon.
    clamp();
  }
  return record;
}

absl::StatusOr<Dataset> Dataset::Create(std::vector<SampleRecord> records) {
  if (records.empty()) {
    return absl::InvalidArgumentError("dataset has no records");
  }
  std::unordered_set<std::string> ids;
  const int num_classes = records.front().NumClasses();
  for (size_t i = 0; i < records.size(); ++i) {
    SampleRecord& record = records[i];
    if (absl::Status status = ValidateRecord(record); !status.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record ", i + 1, " (id \"", record.id, "\"): ", status.message()));
    }
    if (record.NumClasses() != num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", i + 1, " (id \"", record.id,
                       "\"): inconsistent class count ", record.NumClasses(),
                       ", expected ", num_classes));
    }
    if (!ids.insert(record.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate id \"", record.id, "\""));
    }
    record = NormalizeRecord(std::move(record));
  }
  return Dataset(std::move(records), num_classes);
}

Dataset Dataset::FilterByLabel(std::span<const int> labels) const {
  std::vector<SampleRecord> kept;
  for (const SampleRecord& record : records_) {
    if (std::find(labels.begin(), labels.end(), record.true_label) !=
        labels.end()) {
      kept.push_back(record);
    }
  }
  return Dataset(std::move(kept), num_classes_);
}

Dataset Dataset::WithMembership(bool member) const {
  std::vector<SampleRecord> copy = records_;
  for (SampleRecord& record : copy) record.member = member;
  return Dataset(std::move(copy), num_classes_);
}

absl::StatusOr<SampleRecord> ParseRecordLine(absl::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  if (!j.is_object()) {
    return absl::InvalidArgumentError("record must be a JSON object");
  }
  static const std::set<std::string> kKnownFields = {
      "id", "true_label", "probs", "logits", "extra_features", "member"};
  for (const auto& [key, unused] : j.items()) {
    if (!kKnownFields.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown field '", key, "'"));
    }
  }
  SampleRecord record;
  if (!j.contains("id") || !j["id"].is_string()) {
    return absl::InvalidArgumentError("missing string field 'id'");
  }
  record.id = j["id"].get<std::string>();
  if (!j.contains("true_label") || !j["true_label"].is_number_integer()) {
    return absl::InvalidArgumentError("missing integer field 'true_label'");
  }
  record.true_label = j["true_label"].get<int>();
  if (j.contains("probs") && !j["probs"].is_null()) {
    auto probs = ReadRealArray(j["probs"], "probs");
    if (!probs.ok()) return probs.status();
    record.probs = *std::move(probs);
  }
  if (j.contains("logits") && !j["logits"].is_null()) {
    auto logits = ReadRealArray(j["logits"], "logits");
    if (!logits.ok()) return logits.status();
    record.logits = *std::move(logits);
  }
  if (j.contains("extra_features") && !j["extra_features"].is_null()) {
    const Json& extras = j["extra_features"];
    if (!extras.is_object()) {
      return absl::InvalidArgumentError("'extra_features' must be an object");
    }
    for (const auto& [name, value] : extras.items()) {
      if (!value.is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat("extra feature '", name, "' must be a number"));
      }
      record.extra_features[name] = value.get<double>();
    }
  }
  if (j.contains("member") && !j["member"].is_null()) {
    if (!j["member"].is_boolean()) {
      return absl::InvalidArgumentError("'member' must be a boolean");
    }
    record.member = j["member"].get<bool>();
  }
  return record;
}

std::string FormatRecordLine(const SampleRecord& record) {
  Json j;
  j["id"] = record.id;
  j["true_label"] = record.true_label;
  if (record.probs.has_value()) j["probs"] = *record.probs;
  if (record.logits.has_value()) j["logits"] = *record.logits;
  if (!record.extra_features.empty()) {
    Json extras = Json::object();
    for (const auto& [name, value] : record.extra_features) {
      extras[name] = value;
    }
    j["extra_features"] = std::move(extras);
  }
  if (record.member.has_value()) j["member"] = *record.member;
  return DumpJson(j);
}

absl::StatusOr<Dataset> LoadRecords(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::vector<SampleRecord> records;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    absl::StatusOr<SampleRecord> record = ParseRecordLine(line);
    if (record.ok()) {
      if (absl::Status status = ValidateRecord(*record); !status.ok()) {
        record = status;
      }
    }
    if (!record.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_number, ": ", record.status().message()));
    }
    records.push_back(*std::move(record));
  }
  absl::StatusOr<Dataset> dataset = Dataset::Create(std::move(records));
  if (!dataset.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", dataset.status().message()));
  }
  return dataset;
}

absl::Status WriteRecords(std::span<const SampleRecord> records,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  for (const SampleRecord& record : records) {
    out << FormatRecordLine(record) << '\n';
  }
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::pair<Dataset, Dataset>> LoadMembershipPair(
    const std::string& members_path, const std::string& nonmembers_path) {
  absl::StatusOr<Dataset> members = LoadRecords(members_path);
  if (!members.ok()) return members.status();
  absl::StatusOr<Dataset> nonmembers = LoadRecords(nonmembers_path);
  if (!nonmembers.ok()) return nonmembers.status();
  if (members->num_classes() != nonmembers->num_classes()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "class count differs between member (", members->num_classes(),
        ") and non-member (", nonmembers->num_classes(), ") files"));
  }
  return std::make_pair(members->WithMembership(true),
                        nonmembers->WithMembership(false));
}

absl::StatusOr<std::pair<Dataset, Dataset>> SplitByMembership(
    const Dataset& dataset) {
  std::vector<SampleRecord> members;
  std::vector<SampleRecord> nonmembers;
  for (const SampleRecord& record : dataset.records()) {
    if (!record.member.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record \"", record.id, "\" has no member flag"));
    }
    (*record.member ? members : nonmembers).push_back(record);
  }
  absl::StatusOr<Dataset> m = Dataset::Create(std::move(members));
  if (!m.ok()) return absl::InvalidArgumentError("no member records");
  absl::StatusOr<Dataset> n = Dataset::Create(std::move(nonmembers));
  if (!n.ok()) return absl::InvalidArgumentError("no non-member records");
  return std::make_pair(*std::move(m), *std::move(n));
}

}  // namespace mia
