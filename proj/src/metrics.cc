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

#include "mia/metrics.h"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace mia {

absl::StatusOr<double> Accuracy(const std::vector<bool>& predictions,
                                const std::vector<bool>& truth) {
  if (predictions.size() != truth.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("length mismatch: ", predictions.size(), " predictions, ",
                     truth.size(), " labels"));
  }
  if (truth.empty()) return absl::InvalidArgumentError("empty input");
  size_t correct = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    correct += predictions[i] == truth[i];
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

absl::StatusOr<double> AucRoc(std::span<const double> scores,
                              const std::vector<bool>& truth) {
  if (scores.size() != truth.size()) {
    return absl::InvalidArgumentError("length mismatch");
  }
  const size_t n = scores.size();
  const auto positives =
      static_cast<uint64_t>(std::count(truth.begin(), truth.end(), true));
  const uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    return absl::InvalidArgumentError("AUC needs both members and non-members");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Sum of member mid-ranks, doubled: a tie group spanning 1-based ranks
  // [lo, hi] gives each member rank (lo + hi) / 2.
  uint64_t twice_rank_sum = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    uint64_t members_in_group = 0;
    for (size_t k = i; k < j; ++k) members_in_group += truth[order[k]];
    twice_rank_sum += members_in_group * ((i + 1) + j);
    i = j;
  }
  // 2U = 2R - P(P + 1); equals 2 * concordant + ties.
  const uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) /
         static_cast<double>(2 * positives * negatives);
}

absl::StatusOr<AttackScore> ScoreAttack(std::span<const double> scores,
                                        const std::vector<bool>& truth) {
  std::vector<bool> predictions(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) predictions[i] = scores[i] >= 0.5;
  absl::StatusOr<double> accuracy = Accuracy(predictions, truth);
  if (!accuracy.ok()) return accuracy.status();
  absl::StatusOr<double> auc = AucRoc(scores, truth);
  if (!auc.ok()) return auc.status();
  AttackScore score;
  score.accuracy = *accuracy;
  score.auc = *auc;
  score.n_members =
      static_cast<size_t>(std::count(truth.begin(), truth.end(), true));
  score.n_nonmembers = truth.size() - score.n_members;
  return score;
}

}  // namespace mia
