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

// Ensemble of small specialized membership-inference attacks.
//
// One campaign runs `n_instances` instances. Each instance samples the member
// and non-member pools, cuts both samples into small disjoint subsets, and
// pairs member subset i with non-member subset i. Every pair is half-split
// `runs_per_pair` times; each split trains every (scaler, classifier,
// feature subset) cell of the grid on one half and scores the other half.
// The best cell (eval accuracy) represents the run, the best run represents
// the pair, pairs are averaged into an instance score and instances are
// aggregated by mean or max.
//
// All randomness is derived per work unit from the master seed, so results
// are bit-identical for any worker count.

#ifndef MIA_ENGINE_H_
#define MIA_ENGINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mia/attack_models.h"
#include "mia/features.h"
#include "mia/metrics.h"
#include "mia/preprocess.h"
#include "mia/records_io.h"

namespace mia {

enum class Aggregation { kAverage, kBest };
absl::string_view AggregationName(Aggregation aggregation);
absl::StatusOr<Aggregation> ParseAggregation(absl::string_view name);

struct EngineConfig {
  int subset_size = 50;
  int runs_per_pair = 5;
  int n_instances = 50;
  int instance_sample_per_side = 1000;
  FeatureSpec feature_spec = FeatureSpec::Default();
  std::vector<ScalerSpec> scaler_grid = {{ScalerKind::kRobust, true},
                                         {ScalerKind::kMinMax, true},
                                         {ScalerKind::kStandard, true}};
  std::vector<ClassifierKind> classifier_grid = {
      ClassifierKind::kDecisionTree, ClassifierKind::kRandomForest,
      ClassifierKind::kKnn, ClassifierKind::kLogistic};
  // Hyperparameters for every grid cell; kind, scaler and columns are
  // overwritten per cell.
  AttackModelSpec model_template;
  Aggregation aggregation = Aggregation::kAverage;
  // True labels the flow is restricted to; empty means all records (joint
  // mode). Filtering happens before instance sampling.
  std::vector<int> class_filter;
  uint64_t seed = 0;

  // Execution options; never affect results.
  int parallelism = 1;  // 0 = hardware concurrency
  bool keep_models = false;

  absl::Status Validate() const;
};

// Uniform sample without replacement of each pool, as sorted row indices
// local to that pool. A pool smaller than the request is taken whole.
struct InstanceSample {
  std::vector<size_t> member_rows;
  std::vector<size_t> nonmember_rows;
  bool members_truncated = false;
  bool nonmembers_truncated = false;
};

struct PairAssignment {
  int pair_index = 0;
  std::vector<size_t> member_rows;  // local to the member pool
  std::vector<size_t> nonmember_rows;
};

struct RunSplit {
  std::vector<size_t> train_member_rows;
  std::vector<size_t> train_nonmember_rows;
  std::vector<size_t> eval_member_rows;
  std::vector<size_t> eval_nonmember_rows;
};

struct GridCell {
  size_t index = 0;  // enumeration order
  ScalerSpec scaler;
  ClassifierKind classifier = ClassifierKind::kDecisionTree;
  std::vector<std::string> features;
};

// Scaler-major, then classifier, then feature subset.
std::vector<GridCell> EnumerateGrid(const EngineConfig& cfg);

struct RunResult {
  int run_index = 0;
  GridCell winner;
  AttackScore score;
  int skipped_cells = 0;
  std::optional<TrainedAttackModel> model;  // when keep_models
};

struct PairResult {
  int pair_index = 0;
  size_t best_run = 0;  // index into runs
  std::vector<RunResult> runs;

  const RunResult& best() const { return runs[best_run]; }
};

struct InstanceResult {
  int instance_index = 0;
  std::vector<PairResult> pairs;
  double accuracy = 0.0;
  double auc = 0.0;
};

struct CampaignResult {
  std::string experiment;
  EngineConfig config;
  std::vector<InstanceResult> instances;
  // Absent when there are no instances.
  std::optional<double> accuracy;
  std::optional<double> auc;
  std::vector<std::string> warnings;
};

// Which experiment to run: many small attacks (M) or a single whole-sample
// attack (S), optionally restricted to some true labels ("CL0", "CL01").
struct ExperimentSpec {
  std::string name;
  bool many_models = true;
  std::vector<int> class_labels;  // digits after "CL"
};

absl::StatusOr<ExperimentSpec> ParseExperiment(absl::string_view name);

// The six experiments: single and many models, on all data and per class.
std::vector<std::string> DefaultExperiments();

// Operations of the flow, exposed for testing.

absl::StatusOr<InstanceSample> SampleInstance(size_t member_pool,
                                              size_t nonmember_pool,
                                              const EngineConfig& cfg,
                                              int instance_index);

// Shuffles each side, cuts it into ceil(n / subset_size) consecutive
// subsets and zips the two subset lists. Surplus subsets on the longer side
// are dropped, as is any pair with fewer than two rows on a side.
std::vector<PairAssignment> PartitionAndPair(
    std::span<const size_t> member_rows, std::span<const size_t> nonmember_rows,
    const EngineConfig& cfg, int instance_index);

// Stratified half-split: per side, shuffle and put the first floor(s / 2)
// rows in train.
absl::StatusOr<RunSplit> SplitPairRun(const PairAssignment& pair, int run_index,
                                      const EngineConfig& cfg,
                                      int instance_index);

// Tries every grid cell on (train, eval) and keeps the most accurate one;
// ties go to the earliest cell. `stream_path` identifies the work unit and
// is extended by the cell index to seed each fit.
absl::StatusOr<RunResult> GridSearchPairRun(
    const FeatureMatrix& train, const FeatureMatrix& eval,
    const EngineConfig& cfg, std::span<const uint64_t> stream_path);

absl::StatusOr<InstanceResult> RunInstance(const Dataset& members,
                                           const Dataset& nonmembers,
                                           const EngineConfig& cfg,
                                           int instance_index);

// Many-small-attacks campaign over cfg.n_instances instances.
absl::StatusOr<CampaignResult> RunCampaign(const Dataset& members,
                                           const Dataset& nonmembers,
                                           const EngineConfig& cfg,
                                           std::string experiment_name);

// Same pipeline with a single pair spanning the whole instance sample.
absl::StatusOr<CampaignResult> RunBaselineSingle(const Dataset& members,
                                                 const Dataset& nonmembers,
                                                 const EngineConfig& cfg,
                                                 std::string experiment_name);

// Applies the experiment's class filter then dispatches to RunCampaign or
// RunBaselineSingle.
absl::StatusOr<CampaignResult> RunExperiment(const Dataset& members,
                                             const Dataset& nonmembers,
                                             const EngineConfig& cfg,
                                             const ExperimentSpec& experiment);

// Instance and campaign aggregates from their parts.
void AggregateInstance(InstanceResult& instance);
void AggregateCampaign(CampaignResult& campaign, Aggregation aggregation);

struct MembershipVote {
  double vote_fraction = 0.0;
  bool member = false;
};

// Attack mode: every model votes on every record; a record is a member only
// with a strict majority of member votes.
absl::StatusOr<std::vector<MembershipVote>> InferMembership(
    std::span<const TrainedAttackModel> models, const Dataset& unknown,
    const FeatureSpec& features);

// Majority vote over a models-by-records prediction table.
std::vector<MembershipVote> MajorityVote(
    std::span<const std::vector<bool>> votes);

// Winning models of every pair of every instance (needs keep_models).
std::vector<TrainedAttackModel> CollectModels(const CampaignResult& campaign);

}  // namespace mia

#endif  // MIA_ENGINE_H_
