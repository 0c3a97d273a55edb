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

#include "mia/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "mia/features.h"
#include "mia/preprocess.h"
#include "mia/rng.h"

namespace mia {
namespace {

std::vector<double> Losses(const Dataset& dataset) {
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const SampleRecord& record : dataset.records()) {
    out.push_back(CrossEntropyLoss(*record.probs, record.true_label));
  }
  return out;
}

std::vector<int> ChunkSizes(size_t n, size_t size) {
  std::vector<int> out;
  for (size_t start = 0; start < n; start += size) {
    out.push_back(static_cast<int>(std::min(size, n - start)));
  }
  return out;
}

}  // namespace

absl::Status SynthSpec::Validate() const {
  if (num_classes < 2) {
    return absl::InvalidArgumentError("need at least two classes");
  }
  if (n_members <= 0 || n_nonmembers <= 0) {
    return absl::InvalidArgumentError(
        "member and non-member counts must be positive");
  }
  if (!(member_confidence > 0) || !(nonmember_confidence > 0)) {
    return absl::InvalidArgumentError("confidences must be positive");
  }
  if (!label_distribution.empty()) {
    if (label_distribution.size() != static_cast<size_t>(num_classes)) {
      return absl::InvalidArgumentError(
          "label distribution length must equal the class count");
    }
    double sum = 0.0;
    for (double p : label_distribution) {
      if (!(p >= 0)) {
        return absl::InvalidArgumentError("negative label probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
      return absl::InvalidArgumentError("label distribution must sum to 1");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::pair<Dataset, Dataset>> GenerateSyntheticDataset(
    const SynthSpec& spec) {
  if (absl::Status status = spec.Validate(); !status.ok()) return status;
  std::vector<double> weights = spec.label_distribution;
  if (weights.empty()) weights.assign(static_cast<size_t>(spec.num_classes), 1);

  auto generate = [&](int count, double alpha, bool member,
                      uint64_t side) -> absl::StatusOr<Dataset> {
    RandomStream stream =
        MakeStream(spec.seed, {Tag(StreamTag::kSynthetic), side});
    std::discrete_distribution<int> label_dist(weights.begin(), weights.end());
    std::gamma_distribution<double> base(1.0, 1.0);
    std::gamma_distribution<double> boosted(1.0 + alpha, 1.0);
    std::vector<SampleRecord> records(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      SampleRecord& record = records[static_cast<size_t>(i)];
      record.id = absl::StrCat(member ? "m" : "n", i);
      record.true_label = label_dist(stream);
      std::vector<double> probs(static_cast<size_t>(spec.num_classes));
      double sum = 0.0;
      for (int k = 0; k < spec.num_classes; ++k) {
        double g = 0.0;
        while (g <= 0.0) {
          g = k == record.true_label ? boosted(stream) : base(stream);
        }
        probs[static_cast<size_t>(k)] = g;
        sum += g;
      }
      for (double& p : probs) p /= sum;
      record.probs = std::move(probs);
      record.member = member;
    }
    return Dataset::Create(std::move(records));
  };
  absl::StatusOr<Dataset> members =
      generate(spec.n_members, spec.member_confidence, true, 0);
  if (!members.ok()) return members.status();
  absl::StatusOr<Dataset> nonmembers =
      generate(spec.n_nonmembers, spec.nonmember_confidence, false, 1);
  if (!nonmembers.ok()) return nonmembers.status();
  return std::make_pair(*std::move(members), *std::move(nonmembers));
}

double LossThresholdOracle(std::span<const double> member_losses,
                           std::span<const double> nonmember_losses) {
  if (member_losses.empty() || nonmember_losses.empty()) return 0.5;
  std::vector<std::pair<double, bool>> all;
  all.reserve(member_losses.size() + nonmember_losses.size());
  for (double l : member_losses) all.emplace_back(l, true);
  for (double l : nonmember_losses) all.emplace_back(l, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto p = static_cast<double>(member_losses.size());
  const auto n = static_cast<double>(nonmember_losses.size());
  // Threshold below everything: nobody is a member.
  double best = 0.5;
  double true_positives = 0.0;
  double false_positives = 0.0;
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? true_positives : false_positives) += 1.0;
      ++j;
    }
    // Threshold between this group and the next (or above everything).
    best =
        std::max(best, 0.5 * (true_positives / p + (n - false_positives) / n));
    i = j;
  }
  return best;
}

double LossThresholdOracle(const Dataset& members, const Dataset& nonmembers) {
  return LossThresholdOracle(Losses(members), Losses(nonmembers));
}

std::vector<int> PairEvalSizes(const EngineConfig& cfg, size_t member_pool,
                               size_t nonmember_pool) {
  const auto want = static_cast<size_t>(cfg.instance_sample_per_side);
  const auto size = static_cast<size_t>(cfg.subset_size);
  const std::vector<int> m = ChunkSizes(std::min(member_pool, want), size);
  const std::vector<int> n = ChunkSizes(std::min(nonmember_pool, want), size);
  std::vector<int> out;
  for (size_t i = 0; i < std::min(m.size(), n.size()); ++i) {
    if (m[i] < 2 || n[i] < 2) continue;
    out.push_back((m[i] - m[i] / 2) + (n[i] - n[i] / 2));
  }
  return out;
}

absl::StatusOr<NullBiasEstimate> NullSelectionBiasOracle(
    const EngineConfig& cfg, size_t member_pool, size_t nonmember_pool,
    int trials, uint64_t seed, int candidates_per_run) {
  if (trials < 100) {
    return absl::InvalidArgumentError("at least 100 trials are required");
  }
  if (candidates_per_run < 1 || cfg.runs_per_pair < 1 || cfg.n_instances < 1) {
    return absl::InvalidArgumentError("selection counts must be positive");
  }
  const std::vector<int> eval_sizes =
      PairEvalSizes(cfg, member_pool, nonmember_pool);
  if (eval_sizes.empty()) {
    return absl::FailedPreconditionError("configuration yields no pairs");
  }
  const int draws = cfg.runs_per_pair * candidates_per_run;
  std::vector<double> outcomes(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    RandomStream stream = MakeStream(
        seed, {Tag(StreamTag::kNullOracle), static_cast<uint64_t>(t)});
    double campaign = 0.0;
    for (int i = 0; i < cfg.n_instances; ++i) {
      double instance = 0.0;
      for (int eval : eval_sizes) {
        std::binomial_distribution<int> correct(eval, 0.5);
        int best = 0;
        for (int d = 0; d < draws; ++d) best = std::max(best, correct(stream));
        instance += static_cast<double>(best) / eval;
      }
      campaign += instance / static_cast<double>(eval_sizes.size());
    }
    outcomes[static_cast<size_t>(t)] = campaign / cfg.n_instances;
  }
  NullBiasEstimate estimate;
  estimate.mean =
      std::accumulate(outcomes.begin(), outcomes.end(), 0.0) / trials;
  double ss = 0.0;
  for (double v : outcomes) ss += (v - estimate.mean) * (v - estimate.mean);
  estimate.stddev = std::sqrt(ss / (trials - 1));
  std::sort(outcomes.begin(), outcomes.end());
  estimate.p95 = Quantile(outcomes, 0.95);
  return estimate;
}

}  // namespace mia
