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

#include "mia/engine.h"

#include <algorithm>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mia/synthetic.h"
#include "test_util.h"

namespace mia {
namespace {

using ::mia::testing::MakeRecord;
using ::testing::ElementsAre;
using ::testing::SizeIs;

std::pair<Dataset, Dataset> Leaky(int per_side, uint64_t seed) {
  SynthSpec spec;
  spec.n_members = per_side;
  spec.n_nonmembers = per_side;
  spec.member_confidence = 20.0;
  spec.nonmember_confidence = 1.0;
  spec.seed = seed;
  return *GenerateSyntheticDataset(spec);
}

// A one-cell grid keeps engine tests fast.
EngineConfig SmallConfig() {
  EngineConfig cfg;
  cfg.subset_size = 10;
  cfg.runs_per_pair = 2;
  cfg.n_instances = 2;
  cfg.instance_sample_per_side = 30;
  cfg.feature_spec = *FeatureSpec::Parse("loss");
  cfg.scaler_grid = {{ScalerKind::kRobust, true}};
  cfg.classifier_grid = {ClassifierKind::kDecisionTree};
  return cfg;
}

TEST(EngineConfigTest, Validation) {
  EXPECT_TRUE(EngineConfig().Validate().ok());
  EngineConfig cfg;
  cfg.subset_size = 3;
  EXPECT_FALSE(cfg.Validate().ok());
  cfg = EngineConfig();
  cfg.instance_sample_per_side = 10;
  EXPECT_FALSE(cfg.Validate().ok());
  cfg = EngineConfig();
  cfg.classifier_grid.clear();
  EXPECT_FALSE(cfg.Validate().ok());
  cfg = EngineConfig();
  cfg.runs_per_pair = 0;
  EXPECT_FALSE(cfg.Validate().ok());
}

TEST(EnumerateGridTest, ScalerThenClassifierThenSubset) {
  std::vector<GridCell> cells = EnumerateGrid(EngineConfig());
  ASSERT_THAT(cells, SizeIs(3 * 4 * 7));
  EXPECT_EQ(cells[0].scaler.kind, ScalerKind::kRobust);
  EXPECT_EQ(cells[0].classifier, ClassifierKind::kDecisionTree);
  EXPECT_THAT(cells[0].features, SizeIs(6));
  EXPECT_THAT(cells[1].features, SizeIs(5));
  EXPECT_EQ(cells[7].classifier, ClassifierKind::kRandomForest);
  EXPECT_EQ(cells[28].scaler.kind, ScalerKind::kMinMax);
  for (size_t i = 0; i < cells.size(); ++i) EXPECT_EQ(cells[i].index, i);
}

TEST(ParseExperimentTest, NamesAndLabels) {
  absl::StatusOr<ExperimentSpec> m = ParseExperiment("M-CL01");
  ASSERT_TRUE(m.ok());
  EXPECT_TRUE(m->many_models);
  EXPECT_THAT(m->class_labels, ElementsAre(0, 1));
  absl::StatusOr<ExperimentSpec> s = ParseExperiment("S-CL1");
  ASSERT_TRUE(s.ok());
  EXPECT_FALSE(s->many_models);
  EXPECT_THAT(s->class_labels, ElementsAre(1));
  EXPECT_FALSE(ParseExperiment("X-CL0").ok());
  EXPECT_FALSE(ParseExperiment("M-CL").ok());
  EXPECT_FALSE(ParseExperiment("M-CLa").ok());
  EXPECT_THAT(DefaultExperiments(), SizeIs(6));
}

TEST(SampleInstanceTest, DrawsWithoutReplacementAndFlagsSmallPools) {
  EngineConfig cfg = SmallConfig();
  absl::StatusOr<InstanceSample> s = SampleInstance(100, 20, cfg, 3);
  ASSERT_TRUE(s.ok());
  EXPECT_THAT(s->member_rows, SizeIs(30));
  EXPECT_TRUE(std::is_sorted(s->member_rows.begin(), s->member_rows.end()));
  EXPECT_EQ(
      std::set<size_t>(s->member_rows.begin(), s->member_rows.end()).size(),
      30u);
  EXPECT_FALSE(s->members_truncated);
  EXPECT_THAT(s->nonmember_rows, SizeIs(20));
  EXPECT_TRUE(s->nonmembers_truncated);
  EXPECT_NE(SampleInstance(100, 20, cfg, 4)->member_rows, s->member_rows);
  EXPECT_FALSE(SampleInstance(0, 20, cfg, 0).ok());
}

TEST(PartitionAndPairTest, ChunksAndDropsSurplus) {
  EngineConfig cfg = SmallConfig();
  std::vector<size_t> members(35);
  std::vector<size_t> nonmembers(20);
  for (size_t i = 0; i < members.size(); ++i) members[i] = i;
  for (size_t i = 0; i < nonmembers.size(); ++i) nonmembers[i] = 100 + i;
  std::vector<PairAssignment> pairs =
      PartitionAndPair(members, nonmembers, cfg, 0);
  ASSERT_THAT(pairs, SizeIs(2));
  for (const PairAssignment& p : pairs) {
    EXPECT_THAT(p.member_rows, SizeIs(10));
    EXPECT_THAT(p.nonmember_rows, SizeIs(10));
  }
  // A short final chunk below two rows is not paired.
  std::vector<size_t> m21(21);
  for (size_t i = 0; i < m21.size(); ++i) m21[i] = i;
  EXPECT_THAT(PartitionAndPair(m21, m21, cfg, 0), SizeIs(2));
  std::vector<size_t> m24(m21.begin(), m21.end());
  m24.insert(m24.end(), {21, 22, 23});
  std::vector<PairAssignment> three = PartitionAndPair(m24, m24, cfg, 0);
  ASSERT_THAT(three, SizeIs(3));
  EXPECT_THAT(three[2].member_rows, SizeIs(4));
}

TEST(SplitPairRunTest, FloorHalfToTrain) {
  EngineConfig cfg = SmallConfig();
  PairAssignment pair{0, {0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
  absl::StatusOr<RunSplit> split = SplitPairRun(pair, 0, cfg, 0);
  ASSERT_TRUE(split.ok());
  EXPECT_THAT(split->train_member_rows, SizeIs(2));
  EXPECT_THAT(split->eval_member_rows, SizeIs(3));
  EXPECT_THAT(split->train_nonmember_rows, SizeIs(2));
  EXPECT_THAT(split->eval_nonmember_rows, SizeIs(3));

  PairAssignment big;
  for (size_t i = 0; i < 50; ++i) {
    big.member_rows.push_back(i);
    big.nonmember_rows.push_back(50 + i);
  }
  absl::StatusOr<RunSplit> half = SplitPairRun(big, 1, cfg, 0);
  EXPECT_THAT(half->train_member_rows, SizeIs(25));
  EXPECT_THAT(half->eval_nonmember_rows, SizeIs(25));
  EXPECT_NE(SplitPairRun(big, 2, cfg, 0)->train_member_rows,
            half->train_member_rows);

  PairAssignment tiny{0, {0}, {1, 2}};
  EXPECT_FALSE(SplitPairRun(tiny, 0, cfg, 0).ok());
}

TEST(GridSearchPairRunTest, SeparablePairIsPerfect) {
  std::vector<SampleRecord> records;
  for (int i = 0; i < 20; ++i) {
    const bool member = i < 10;
    const double p = member ? 0.95 + 0.001 * i : 0.3 + 0.01 * i;
    records.push_back(
        MakeRecord("r" + std::to_string(i), 0, {p, 1.0 - p}, member));
  }
  absl::StatusOr<Dataset> d = Dataset::Create(records);
  EngineConfig cfg = SmallConfig();
  absl::StatusOr<FeatureMatrix> m = BuildFeatureMatrix(*d, cfg.feature_spec);
  const size_t train_rows[] = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  const size_t eval_rows[] = {1, 3, 5, 7, 9, 11, 13, 15, 17, 19};
  const uint64_t path[] = {0, 0, 0};
  absl::StatusOr<RunResult> run = GridSearchPairRun(
      m->SelectRows(train_rows), m->SelectRows(eval_rows), cfg, path);
  ASSERT_TRUE(run.ok()) << run.status();
  EXPECT_EQ(run->score.accuracy, 1.0);
  EXPECT_EQ(run->score.auc, 1.0);
  EXPECT_EQ(run->winner.index, 0u);
  EXPECT_EQ(run->skipped_cells, 0);
}

TEST(GridSearchPairRunTest, WinnerIsArgmaxWithEarliestTie) {
  auto [members, nonmembers] = Leaky(40, 5);
  EngineConfig cfg = SmallConfig();
  cfg.feature_spec = FeatureSpec::Default();
  cfg.scaler_grid = {{ScalerKind::kRobust, true}, {ScalerKind::kMinMax, true}};
  cfg.classifier_grid = {ClassifierKind::kDecisionTree, ClassifierKind::kKnn};
  absl::StatusOr<FeatureMatrix> m = FeatureMatrix::Concat(
      *BuildFeatureMatrix(members.WithMembership(true), cfg.feature_spec),
      *BuildFeatureMatrix(nonmembers.WithMembership(false), cfg.feature_spec));
  std::vector<size_t> train;
  std::vector<size_t> eval;
  for (size_t r = 0; r < m->rows(); ++r) (r % 2 ? eval : train).push_back(r);
  const FeatureMatrix tr = m->SelectRows(train);
  const FeatureMatrix ev = m->SelectRows(eval);
  const uint64_t path[] = {1, 2, 3};
  absl::StatusOr<RunResult> run = GridSearchPairRun(tr, ev, cfg, path);
  ASSERT_TRUE(run.ok());

  // Re-score every cell independently and check the selection rule.
  double best = -1.0;
  size_t best_index = 0;
  for (const GridCell& cell : EnumerateGrid(cfg)) {
    AttackModelSpec spec = cfg.model_template;
    spec.kind = cell.classifier;
    spec.scaler = cell.scaler;
    const std::vector<size_t> columns = *tr.ColumnsForFeatures(cell.features);
    for (size_t c : columns) {
      spec.feature_columns.push_back(tr.columns()[c]);
    }
    RandomStream stream(
        DeriveSeed(cfg.seed, {Tag(StreamTag::kFit), 1, 2, 3, cell.index}));
    absl::StatusOr<TrainedAttackModel> model = FitAttackModel(spec, tr, stream);
    ASSERT_TRUE(model.ok());
    absl::StatusOr<AttackScore> score =
        ScoreAttack(*ScoreSamples(*model, ev), *ev.row_membership());
    if (score->accuracy > best) {
      best = score->accuracy;
      best_index = cell.index;
    }
  }
  EXPECT_EQ(run->score.accuracy, best);
  EXPECT_EQ(run->winner.index, best_index);
}

TEST(AggregationTest, MeanOverPairsThenInstances) {
  auto pair = [](double accuracy, double auc) {
    PairResult p;
    RunResult r;
    r.score.accuracy = accuracy;
    r.score.auc = auc;
    p.runs = {r};
    return p;
  };
  InstanceResult a;
  a.pairs = {pair(0.6, 0.7), pair(0.8, 0.9)};
  AggregateInstance(a);
  EXPECT_DOUBLE_EQ(a.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(a.auc, 0.8);
  InstanceResult b;
  b.pairs = {pair(0.5, 0.95)};
  AggregateInstance(b);

  CampaignResult c;
  c.instances = {a, b};
  AggregateCampaign(c, Aggregation::kAverage);
  EXPECT_DOUBLE_EQ(*c.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(*c.auc, 0.875);
  AggregateCampaign(c, Aggregation::kBest);
  // Accuracy and AUC maxima are taken independently.
  EXPECT_DOUBLE_EQ(*c.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(*c.auc, 0.95);

  CampaignResult empty;
  AggregateCampaign(empty, Aggregation::kAverage);
  EXPECT_FALSE(empty.accuracy.has_value());
}

TEST(RunCampaignTest, StructureAndWarnings) {
  auto [members, nonmembers] = Leaky(25, 1);
  EngineConfig cfg = SmallConfig();
  absl::StatusOr<CampaignResult> c =
      RunCampaign(members, nonmembers, cfg, "M-CL01");
  ASSERT_TRUE(c.ok()) << c.status();
  ASSERT_THAT(c->instances, SizeIs(2));
  for (const InstanceResult& instance : c->instances) {
    ASSERT_THAT(instance.pairs, SizeIs(3));
    EXPECT_THAT(instance.pairs[2].runs, SizeIs(2));
  }
  ASSERT_THAT(c->warnings, SizeIs(1));
  EXPECT_GT(*c->accuracy, 0.5);
}

TEST(RunCampaignTest, ZeroInstancesGiveNoAggregate) {
  auto [members, nonmembers] = Leaky(30, 1);
  EngineConfig cfg = SmallConfig();
  cfg.n_instances = 0;
  absl::StatusOr<CampaignResult> c =
      RunCampaign(members, nonmembers, cfg, "M-CL01");
  ASSERT_TRUE(c.ok());
  EXPECT_TRUE(c->instances.empty());
  EXPECT_FALSE(c->accuracy.has_value());
}

TEST(RunBaselineSingleTest, OnePairOfWholeSample) {
  auto [members, nonmembers] = Leaky(60, 2);
  EngineConfig cfg = SmallConfig();
  absl::StatusOr<CampaignResult> c =
      RunBaselineSingle(members, nonmembers, cfg, "S-CL01");
  ASSERT_TRUE(c.ok());
  for (const InstanceResult& instance : c->instances) {
    ASSERT_THAT(instance.pairs, SizeIs(1));
    EXPECT_EQ(instance.pairs[0].best().score.n_members, 15u);
    EXPECT_THAT(instance.pairs[0].runs, SizeIs(2));
  }
  EXPECT_EQ(c->config.subset_size, cfg.subset_size);
}

TEST(RunExperimentTest, FiltersLabels) {
  std::vector<SampleRecord> m;
  std::vector<SampleRecord> n;
  for (int i = 0; i < 40; ++i) {
    m.push_back(MakeRecord("m" + std::to_string(i), i % 2, {0.5, 0.5}));
    n.push_back(MakeRecord("n" + std::to_string(i), 0, {0.6, 0.4}));
  }
  Dataset members = *Dataset::Create(m);
  Dataset nonmembers = *Dataset::Create(n);
  EngineConfig cfg = SmallConfig();
  absl::StatusOr<CampaignResult> only1 =
      RunExperiment(members, nonmembers, cfg, *ParseExperiment("M-CL1"));
  EXPECT_TRUE(absl::IsFailedPrecondition(only1.status()));
  absl::StatusOr<CampaignResult> only0 =
      RunExperiment(members, nonmembers, cfg, *ParseExperiment("M-CL0"));
  ASSERT_TRUE(only0.ok()) << only0.status();
  EXPECT_THAT(only0->config.class_filter, ElementsAre(0));
  EXPECT_FALSE(
      RunExperiment(members, nonmembers, cfg, *ParseExperiment("M-CL2")).ok());
}

TEST(RunCampaignTest, ParallelismDoesNotChangeResults) {
  auto [members, nonmembers] = Leaky(40, 3);
  EngineConfig cfg = SmallConfig();
  cfg.classifier_grid = {ClassifierKind::kRandomForest,
                         ClassifierKind::kLogistic};
  cfg.keep_models = true;
  absl::StatusOr<CampaignResult> serial =
      RunCampaign(members, nonmembers, cfg, "M");
  cfg.parallelism = 4;
  absl::StatusOr<CampaignResult> parallel =
      RunCampaign(members, nonmembers, cfg, "M");
  ASSERT_TRUE(serial.ok());
  ASSERT_TRUE(parallel.ok());
  ASSERT_EQ(serial->instances.size(), parallel->instances.size());
  EXPECT_EQ(*serial->accuracy, *parallel->accuracy);
  EXPECT_EQ(*serial->auc, *parallel->auc);
  EXPECT_EQ(CollectModels(*serial), CollectModels(*parallel));
}

TEST(MajorityVoteTest, StrictMajorityAndTies) {
  const std::vector<std::vector<bool>> votes = {{true, true, false},
                                                {true, false, false}};
  std::vector<MembershipVote> out = MajorityVote(votes);
  ASSERT_THAT(out, SizeIs(3));
  EXPECT_EQ(out[0].vote_fraction, 1.0);
  EXPECT_TRUE(out[0].member);
  EXPECT_EQ(out[1].vote_fraction, 0.5);
  EXPECT_FALSE(out[1].member);
  EXPECT_FALSE(out[2].member);
  EXPECT_TRUE(MajorityVote({}).empty());
}

TEST(InferMembershipTest, MembersGetMoreVotes) {
  auto [members, nonmembers] = Leaky(100, 4);
  EngineConfig cfg = SmallConfig();
  cfg.instance_sample_per_side = 60;
  cfg.keep_models = true;
  absl::StatusOr<CampaignResult> c =
      RunCampaign(members, nonmembers, cfg, "M-CL01");
  ASSERT_TRUE(c.ok());
  std::vector<TrainedAttackModel> models = CollectModels(*c);
  EXPECT_THAT(models, SizeIs(2 * 6));
  auto mean_vote = [&](const Dataset& d) {
    std::vector<MembershipVote> v =
        *InferMembership(models, d, cfg.feature_spec);
    double sum = 0.0;
    for (const MembershipVote& x : v) sum += x.vote_fraction;
    return sum / static_cast<double>(v.size());
  };
  EXPECT_GT(mean_vote(members), mean_vote(nonmembers));
  EXPECT_FALSE(InferMembership({}, members, cfg.feature_spec).ok());
}

}  // namespace
}  // namespace mia
