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

// Audit report: one JSON document holding every experiment of a run.
//
//   {"config": {...}, "seed": 7,
//    "experiments": {"M-CL01": {
//        "aggregate": {"accuracy": .., "auc": .., "mode": "average"},
//        "instances": [{"index": 0, "accuracy": .., "auc": ..,
//                       "pairs": [{"index": 0, "best_run": {
//                           "run": 2, "scaler": "robust",
//                           "classifier": "forest", "features": [..],
//                           "accuracy": .., "auc": ..}}]}]}}}
//
// Reals use 17 significant digits so the aggregates can be recomputed
// exactly from the per-pair entries.

#ifndef MIA_REPORT_H_
#define MIA_REPORT_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "mia/engine.h"
#include "mia/json_text.h"

namespace mia {

struct AuditReport {
  EngineConfig config;
  std::vector<CampaignResult> experiments;
};

Json ConfigToJson(const EngineConfig& cfg);
Json CampaignToJson(const CampaignResult& campaign);
Json ReportToJson(const AuditReport& report);
std::string FormatReport(const AuditReport& report);

absl::Status WriteReport(const AuditReport& report, const std::string& path);
absl::StatusOr<Json> ReadReport(const std::string& path);

// Checks that every instance score is the mean of its pairs' best runs and
// every aggregate follows from its instances under the recorded mode.
absl::Status VerifyReport(const Json& report);

}  // namespace mia

#endif  // MIA_REPORT_H_
