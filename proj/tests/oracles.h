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

// Brute-force reference implementations the library is checked against.

#ifndef MIA_TESTS_ORACLES_H_
#define MIA_TESTS_ORACLES_H_

#include <cstdint>
#include <random>
#include <vector>

namespace mia::testing {

// Concordant-pair AUC: every (member, non-member) pair scores 1 when the
// member scores higher and 1/2 on a tie.
inline double PairwiseAuc(const std::vector<double>& scores,
                          const std::vector<bool>& truth) {
  uint64_t twice_wins = 0;
  uint64_t pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!truth[i]) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (truth[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) twice_wins += 2;
      if (scores[i] == scores[j]) twice_wins += 1;
    }
  }
  return static_cast<double>(twice_wins) / static_cast<double>(2 * pairs);
}

inline double CountingAccuracy(const std::vector<bool>& predictions,
                               const std::vector<bool>& truth) {
  int correct = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (predictions[i] == truth[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

struct ScoredInstance {
  std::vector<double> scores;
  std::vector<bool> truth;
};

// 2 <= n <= 200 with both classes present. Scores come from a handful of
// discrete levels about half the time so tie handling is exercised.
inline ScoredInstance RandomScoredInstance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 200);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> levels(2, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ScoredInstance out;
  const int n = size(rng);
  const bool discrete = coin(rng);
  const int k = levels(rng);
  std::uniform_int_distribution<int> level(0, k - 1);
  const double member_rate = unit(rng);
  std::bernoulli_distribution member(member_rate);
  for (int i = 0; i < n; ++i) {
    out.truth.push_back(member(rng));
    out.scores.push_back(discrete ? static_cast<double>(level(rng)) / (k - 1)
                                  : unit(rng));
  }
  out.truth[0] = true;
  out.truth[1] = false;
  return out;
}

}  // namespace mia::testing

#endif  // MIA_TESTS_ORACLES_H_
