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

// Saved ensembles: the winning attack models of an audit, with everything
// needed to score new records in attack mode. Versioned JSON container:
//   {"format": "mia-ensemble", "version": 1, "num_classes": 2,
//    "features": [...], "experiments": [{"name": "M-CL01", "models": [...]}]}

#ifndef MIA_ENSEMBLE_IO_H_
#define MIA_ENSEMBLE_IO_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "mia/attack_models.h"
#include "mia/features.h"
#include "mia/json_text.h"

namespace mia {

inline constexpr int kEnsembleFormatVersion = 1;

struct SavedEnsemble {
  FeatureSpec features = FeatureSpec::Default();
  int num_classes = 2;
  std::vector<std::pair<std::string, std::vector<TrainedAttackModel>>>
      experiments;

  // Models of the named experiment.
  absl::StatusOr<std::vector<TrainedAttackModel>> Models(
      const std::string& experiment) const;
};

Json ModelToJson(const TrainedAttackModel& model);
absl::StatusOr<TrainedAttackModel> ModelFromJson(const Json& j);

absl::Status SaveEnsemble(const SavedEnsemble& ensemble,
                          const std::string& path);
absl::StatusOr<SavedEnsemble> LoadEnsemble(const std::string& path);

}  // namespace mia

#endif  // MIA_ENSEMBLE_IO_H_
