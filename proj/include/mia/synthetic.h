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

// Synthetic target-model outputs with a tunable member/non-member confidence
// gap, plus Monte-Carlo and exhaustive-scan oracles used to calibrate the
// attack engine.

#ifndef MIA_SYNTHETIC_H_
#define MIA_SYNTHETIC_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "mia/engine.h"
#include "mia/records_io.h"

namespace mia {

struct SynthSpec {
  int num_classes = 2;
  int n_members = 2000;
  int n_nonmembers = 2000;
  // Extra Dirichlet concentration on the true class. A larger value for
  // members than for non-members models an overfitted target.
  double member_confidence = 20.0;
  double nonmember_confidence = 2.0;
  // Empty means uniform.
  std::vector<double> label_distribution;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

// Each record draws its label from label_distribution and its probability
// vector from Dirichlet(1 + alpha * e_label), alpha depending on membership.
absl::StatusOr<std::pair<Dataset, Dataset>> GenerateSyntheticDataset(
    const SynthSpec& spec);

// Best balanced accuracy of "member iff loss <= t" over every threshold
// (all midpoints of the sorted losses plus both extremes).
double LossThresholdOracle(std::span<const double> member_losses,
                           std::span<const double> nonmember_losses);
double LossThresholdOracle(const Dataset& members, const Dataset& nonmembers);

struct NullBiasEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  double p95 = 0.0;
};

// Monte-Carlo distribution of the campaign-average accuracy when eval
// membership is exchangeable. The instance and pair geometry (sample sizes,
// subset chunking, eval halves) mirrors the engine for pools of the given
// sizes. Each pair keeps the best of runs_per_pair * candidates_per_run
// independent Binomial(eval_size, 1/2) / eval_size draws.
absl::StatusOr<NullBiasEstimate> NullSelectionBiasOracle(
    const EngineConfig& cfg, size_t member_pool, size_t nonmember_pool,
    int trials, uint64_t seed, int candidates_per_run = 1);

// Eval-half sizes (members + non-members) of each pair an instance would
// produce for pools of the given sizes.
std::vector<int> PairEvalSizes(const EngineConfig& cfg, size_t member_pool,
                               size_t nonmember_pool);

}  // namespace mia

#endif  // MIA_SYNTHETIC_H_
