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

#ifndef MIA_METRICS_H_
#define MIA_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace mia {

struct AttackScore {
  double accuracy = 0.0;
  double auc = 0.5;
  size_t n_members = 0;
  size_t n_nonmembers = 0;

  friend bool operator==(const AttackScore&, const AttackScore&) = default;
};

// Fraction of positions where prediction == truth. The span<const bool>
// overloads are not usable with std::vector<bool>, hence vectors here.
absl::StatusOr<double> Accuracy(const std::vector<bool>& predictions,
                                const std::vector<bool>& truth);

// Area under the ROC curve in Mann-Whitney form: the probability that a
// random member outscores a random non-member, ties counting one half.
// Computed from mid-ranks in O(n log n); the numerator is accumulated in
// integer half-units so the result is exact.
absl::StatusOr<double> AucRoc(std::span<const double> scores,
                              const std::vector<bool>& truth);

// Accuracy of score >= 0.5 predictions plus AUC of the raw scores.
absl::StatusOr<AttackScore> ScoreAttack(std::span<const double> scores,
                                        const std::vector<bool>& truth);

}  // namespace mia

#endif  // MIA_METRICS_H_
