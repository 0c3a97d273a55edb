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
#include <atomic>
#include <functional>
#include <numeric>
#include <thread>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "mia/rng.h"

namespace mia {
namespace {

constexpr uint64_t kMemberSide = 0;
constexpr uint64_t kNonmemberSide = 1;

void ParallelFor(size_t n, int parallelism,
                 const std::function<void(size_t)>& fn) {
  size_t workers = parallelism > 0
                       ? static_cast<size_t>(parallelism)
                       : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::vector<size_t> ShuffledCopy(std::span<const size_t> rows,
                                 RandomStream stream) {
  std::vector<size_t> out(rows.begin(), rows.end());
  std::shuffle(out.begin(), out.end(), stream);
  return out;
}

// One (instance, pair, run) unit of work.
struct RunTask {
  size_t instance_slot;
  size_t pair_slot;
  int run_index;
};

// Shared, read-only state of one campaign: the pooled feature matrix with
// member rows first.
class CampaignRunner {
 public:
  static absl::StatusOr<CampaignRunner> Create(const Dataset& members,
                                               const Dataset& nonmembers,
                                               const EngineConfig& cfg) {
    if (absl::Status status = cfg.Validate(); !status.ok()) return status;
    if (members.empty() || nonmembers.empty()) {
      return absl::FailedPreconditionError(members.empty()
                                               ? "member side is empty"
                                               : "non-member side is empty");
    }
    if (members.num_classes() != nonmembers.num_classes()) {
      return absl::InvalidArgumentError(
          "member and non-member class counts differ");
    }
    absl::StatusOr<FeatureMatrix> m =
        BuildFeatureMatrix(members.WithMembership(true), cfg.feature_spec);
    if (!m.ok()) return m.status();
    absl::StatusOr<FeatureMatrix> n =
        BuildFeatureMatrix(nonmembers.WithMembership(false), cfg.feature_spec);
    if (!n.ok()) return n.status();
    absl::StatusOr<FeatureMatrix> pooled = FeatureMatrix::Concat(*m, *n);
    if (!pooled.ok()) return pooled.status();
    return CampaignRunner(cfg, *std::move(pooled), members.size(),
                          nonmembers.size());
  }

  // Runs the given instances; results are ordered like `instance_indices`.
  absl::StatusOr<std::vector<InstanceResult>> Run(
      std::span<const int> instance_indices,
      std::vector<std::string>* warnings) const {
    std::vector<InstanceResult> instances(instance_indices.size());
    std::vector<std::vector<PairAssignment>> plans(instance_indices.size());
    bool truncated = false;
    for (size_t s = 0; s < instance_indices.size(); ++s) {
      const int index = instance_indices[s];
      absl::StatusOr<InstanceSample> sample =
          SampleInstance(member_count_, nonmember_count_, cfg_, index);
      if (!sample.ok()) return sample.status();
      truncated |= sample->members_truncated || sample->nonmembers_truncated;
      plans[s] = PartitionAndPair(sample->member_rows, sample->nonmember_rows,
                                  cfg_, index);
      if (plans[s].empty()) {
        return absl::FailedPreconditionError(absl::StrCat(
            "instance ", index, " has no pair with at least 2 rows per side"));
      }
      instances[s].instance_index = index;
      instances[s].pairs.resize(plans[s].size());
      for (size_t p = 0; p < plans[s].size(); ++p) {
        instances[s].pairs[p].pair_index = plans[s][p].pair_index;
        instances[s].pairs[p].runs.resize(
            static_cast<size_t>(cfg_.runs_per_pair));
      }
    }
    if (truncated && warnings != nullptr) {
      warnings->push_back(absl::StrCat(
          "a pool has fewer than ", cfg_.instance_sample_per_side,
          " records; instances use the whole pool (members: ", member_count_,
          ", non-members: ", nonmember_count_, ")"));
    }

    std::vector<RunTask> tasks;
    for (size_t s = 0; s < plans.size(); ++s) {
      for (size_t p = 0; p < plans[s].size(); ++p) {
        for (int r = 0; r < cfg_.runs_per_pair; ++r) tasks.push_back({s, p, r});
      }
    }
    std::vector<absl::Status> statuses(tasks.size());
    ParallelFor(tasks.size(), cfg_.parallelism, [&](size_t t) {
      const RunTask& task = tasks[t];
      const int instance_index = instance_indices[task.instance_slot];
      const PairAssignment& pair = plans[task.instance_slot][task.pair_slot];
      absl::StatusOr<RunResult> run =
          ExecuteRun(pair, task.run_index, instance_index);
      if (!run.ok()) {
        statuses[t] = run.status();
        return;
      }
      instances[task.instance_slot]
          .pairs[task.pair_slot]
          .runs[static_cast<size_t>(task.run_index)] = *std::move(run);
    });
    for (const absl::Status& status : statuses) {
      if (!status.ok()) return status;
    }

    for (InstanceResult& instance : instances) {
      for (PairResult& pair : instance.pairs) {
        pair.best_run = 0;
        for (size_t r = 1; r < pair.runs.size(); ++r) {
          if (pair.runs[r].score.accuracy >
              pair.runs[pair.best_run].score.accuracy) {
            pair.best_run = r;
          }
        }
        if (!cfg_.keep_models) continue;
        for (size_t r = 0; r < pair.runs.size(); ++r) {
          if (r != pair.best_run) pair.runs[r].model.reset();
        }
      }
      AggregateInstance(instance);
    }
    return instances;
  }

 private:
  CampaignRunner(const EngineConfig& cfg, FeatureMatrix pooled,
                 size_t member_count, size_t nonmember_count)
      : cfg_(cfg),
        pooled_(std::move(pooled)),
        member_count_(member_count),
        nonmember_count_(nonmember_count) {}

  absl::StatusOr<RunResult> ExecuteRun(const PairAssignment& pair,
                                       int run_index,
                                       int instance_index) const {
    absl::StatusOr<RunSplit> split =
        SplitPairRun(pair, run_index, cfg_, instance_index);
    if (!split.ok()) return split.status();
    auto pooled_rows = [this](const std::vector<size_t>& m,
                              const std::vector<size_t>& n) {
      std::vector<size_t> rows = m;
      for (size_t r : n) rows.push_back(member_count_ + r);
      return rows;
    };
    const FeatureMatrix train = pooled_.SelectRows(
        pooled_rows(split->train_member_rows, split->train_nonmember_rows));
    const FeatureMatrix eval = pooled_.SelectRows(
        pooled_rows(split->eval_member_rows, split->eval_nonmember_rows));
    const uint64_t path[] = {static_cast<uint64_t>(instance_index),
                             static_cast<uint64_t>(pair.pair_index),
                             static_cast<uint64_t>(run_index)};
    absl::StatusOr<RunResult> run = GridSearchPairRun(train, eval, cfg_, path);
    if (run.ok()) run->run_index = run_index;
    return run;
  }

  EngineConfig cfg_;
  FeatureMatrix pooled_;
  size_t member_count_;
  size_t nonmember_count_;
};

std::vector<int> Iota(int n) {
  std::vector<int> out(static_cast<size_t>(std::max(n, 0)));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace

absl::string_view AggregationName(Aggregation aggregation) {
  return aggregation == Aggregation::kBest ? "best" : "average";
}

absl::StatusOr<Aggregation> ParseAggregation(absl::string_view name) {
  if (name == "average") return Aggregation::kAverage;
  if (name == "best") return Aggregation::kBest;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown aggregation '", name, "' (expected average|best)"));
}

absl::Status EngineConfig::Validate() const {
  if (subset_size < 4) {
    return absl::InvalidArgumentError("subset size must be at least 4");
  }
  if (runs_per_pair < 1) {
    return absl::InvalidArgumentError("runs per pair must be at least 1");
  }
  if (n_instances < 0) {
    return absl::InvalidArgumentError("instance count must be non-negative");
  }
  if (instance_sample_per_side < subset_size) {
    return absl::InvalidArgumentError(
        "instance sample size must be at least the subset size");
  }
  if (scaler_grid.empty() || classifier_grid.empty()) {
    return absl::InvalidArgumentError(
        "scaler and classifier grids must be "
        "non-empty");
  }
  if (parallelism < 0) {
    return absl::InvalidArgumentError("parallelism must be non-negative");
  }
  AttackModelSpec probe = model_template;
  probe.feature_columns = {"probe"};
  return probe.Validate();
}

std::vector<GridCell> EnumerateGrid(const EngineConfig& cfg) {
  std::vector<GridCell> cells;
  const auto subsets = cfg.feature_spec.CandidateSubsets();
  for (const ScalerSpec& scaler : cfg.scaler_grid) {
    for (ClassifierKind classifier : cfg.classifier_grid) {
      for (const auto& subset : subsets) {
        cells.push_back({cells.size(), scaler, classifier, subset});
      }
    }
  }
  return cells;
}

absl::StatusOr<ExperimentSpec> ParseExperiment(absl::string_view name) {
  ExperimentSpec spec;
  spec.name = std::string(name);
  absl::string_view rest;
  if (absl::StartsWith(name, "M-CL")) {
    spec.many_models = true;
  } else if (absl::StartsWith(name, "S-CL")) {
    spec.many_models = false;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown experiment '", name,
                     "' (expected S-CL<labels> or M-CL<labels>)"));
  }
  rest = name.substr(4);
  if (rest.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("experiment '", name, "' lists no class labels"));
  }
  for (char c : rest) {
    if (!absl::ascii_isdigit(static_cast<unsigned char>(c))) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad class label in experiment '", name, "'"));
    }
    const int label = c - '0';
    if (std::find(spec.class_labels.begin(), spec.class_labels.end(), label) ==
        spec.class_labels.end()) {
      spec.class_labels.push_back(label);
    }
  }
  return spec;
}

std::vector<std::string> DefaultExperiments() {
  return {"S-CL01", "M-CL01", "S-CL0", "M-CL0", "S-CL1", "M-CL1"};
}

absl::StatusOr<InstanceSample> SampleInstance(size_t member_pool,
                                              size_t nonmember_pool,
                                              const EngineConfig& cfg,
                                              int instance_index) {
  if (member_pool == 0 || nonmember_pool == 0) {
    return absl::FailedPreconditionError("cannot sample from an empty pool");
  }
  const auto want = static_cast<size_t>(cfg.instance_sample_per_side);
  auto draw = [&](size_t pool, uint64_t side, bool* truncated) {
    std::vector<size_t> all(pool);
    std::iota(all.begin(), all.end(), size_t{0});
    *truncated = pool < want;
    if (pool <= want) return all;
    RandomStream stream =
        MakeStream(cfg.seed, {Tag(StreamTag::kInstanceSample),
                              static_cast<uint64_t>(instance_index), side});
    std::shuffle(all.begin(), all.end(), stream);
    all.resize(want);
    std::sort(all.begin(), all.end());
    return all;
  };
  InstanceSample sample;
  sample.member_rows =
      draw(member_pool, kMemberSide, &sample.members_truncated);
  sample.nonmember_rows =
      draw(nonmember_pool, kNonmemberSide, &sample.nonmembers_truncated);
  return sample;
}

std::vector<PairAssignment> PartitionAndPair(
    std::span<const size_t> member_rows, std::span<const size_t> nonmember_rows,
    const EngineConfig& cfg, int instance_index) {
  const auto chunk = [&](std::span<const size_t> rows, uint64_t side) {
    const std::vector<size_t> shuffled = ShuffledCopy(
        rows,
        MakeStream(cfg.seed, {Tag(StreamTag::kPartition),
                              static_cast<uint64_t>(instance_index), side}));
    const auto size = static_cast<size_t>(cfg.subset_size);
    std::vector<std::vector<size_t>> subsets;
    for (size_t start = 0; start < shuffled.size(); start += size) {
      const size_t end = std::min(start + size, shuffled.size());
      subsets.emplace_back(shuffled.begin() + static_cast<long>(start),
                           shuffled.begin() + static_cast<long>(end));
    }
    return subsets;
  };
  std::vector<std::vector<size_t>> member_subsets =
      chunk(member_rows, kMemberSide);
  std::vector<std::vector<size_t>> nonmember_subsets =
      chunk(nonmember_rows, kNonmemberSide);
  const size_t n_pairs =
      std::min(member_subsets.size(), nonmember_subsets.size());
  std::vector<PairAssignment> pairs;
  for (size_t i = 0; i < n_pairs; ++i) {
    if (member_subsets[i].size() < 2 || nonmember_subsets[i].size() < 2) {
      continue;
    }
    pairs.push_back({static_cast<int>(i), std::move(member_subsets[i]),
                     std::move(nonmember_subsets[i])});
  }
  return pairs;
}

absl::StatusOr<RunSplit> SplitPairRun(const PairAssignment& pair, int run_index,
                                      const EngineConfig& cfg,
                                      int instance_index) {
  if (pair.member_rows.size() < 2 || pair.nonmember_rows.size() < 2) {
    return absl::FailedPreconditionError(absl::StrCat(
        "pair ", pair.pair_index, " needs at least 2 rows per side"));
  }
  RunSplit split;
  const auto halve = [&](std::span<const size_t> rows, uint64_t side,
                         std::vector<size_t>& train,
                         std::vector<size_t>& eval) {
    const std::vector<size_t> shuffled = ShuffledCopy(
        rows, MakeStream(cfg.seed, {Tag(StreamTag::kSplit),
                                    static_cast<uint64_t>(instance_index),
                                    static_cast<uint64_t>(pair.pair_index),
                                    static_cast<uint64_t>(run_index), side}));
    const size_t half = shuffled.size() / 2;
    train.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(half));
    eval.assign(shuffled.begin() + static_cast<long>(half), shuffled.end());
  };
  halve(pair.member_rows, kMemberSide, split.train_member_rows,
        split.eval_member_rows);
  halve(pair.nonmember_rows, kNonmemberSide, split.train_nonmember_rows,
        split.eval_nonmember_rows);
  return split;
}

absl::StatusOr<RunResult> GridSearchPairRun(
    const FeatureMatrix& train, const FeatureMatrix& eval,
    const EngineConfig& cfg, std::span<const uint64_t> stream_path) {
  if (!eval.has_membership()) {
    return absl::InvalidArgumentError("eval matrix has no membership");
  }
  const std::vector<bool>& truth = *eval.row_membership();
  std::vector<uint64_t> path = {Tag(StreamTag::kFit)};
  path.insert(path.end(), stream_path.begin(), stream_path.end());
  path.push_back(0);

  RunResult result;
  bool found = false;
  absl::Status last_error;
  for (GridCell& cell : EnumerateGrid(cfg)) {
    AttackModelSpec spec = cfg.model_template;
    spec.kind = cell.classifier;
    spec.scaler = cell.scaler;
    absl::StatusOr<std::vector<size_t>> columns =
        train.ColumnsForFeatures(cell.features);
    if (!columns.ok()) return columns.status();
    spec.feature_columns.clear();
    for (size_t c : *columns)
      spec.feature_columns.push_back(train.columns()[c]);

    path.back() = cell.index;
    RandomStream stream(DeriveSeed(cfg.seed, path));
    absl::StatusOr<TrainedAttackModel> model =
        FitAttackModel(spec, train, stream);
    absl::StatusOr<AttackScore> score = absl::UnknownError("unscored");
    if (model.ok()) {
      absl::StatusOr<std::vector<double>> scores = ScoreSamples(*model, eval);
      score = scores.ok() ? ScoreAttack(*scores, truth)
                          : absl::StatusOr<AttackScore>(scores.status());
    } else {
      score = model.status();
    }
    if (!score.ok()) {
      ++result.skipped_cells;
      last_error = score.status();
      continue;
    }
    if (!found || score->accuracy > result.score.accuracy) {
      found = true;
      result.winner = std::move(cell);
      result.score = *score;
      if (cfg.keep_models) result.model = *std::move(model);
    }
  }
  if (!found) {
    return absl::InternalError(absl::StrCat(
        "every grid cell failed; last error: ", last_error.message()));
  }
  return result;
}

void AggregateInstance(InstanceResult& instance) {
  double accuracy = 0.0;
  double auc = 0.0;
  for (const PairResult& pair : instance.pairs) {
    accuracy += pair.best().score.accuracy;
    auc += pair.best().score.auc;
  }
  const auto n = static_cast<double>(instance.pairs.size());
  instance.accuracy = n > 0 ? accuracy / n : 0.0;
  instance.auc = n > 0 ? auc / n : 0.0;
}

void AggregateCampaign(CampaignResult& campaign, Aggregation aggregation) {
  campaign.accuracy.reset();
  campaign.auc.reset();
  if (campaign.instances.empty()) return;
  double accuracy = 0.0;
  double auc = 0.0;
  if (aggregation == Aggregation::kAverage) {
    for (const InstanceResult& instance : campaign.instances) {
      accuracy += instance.accuracy;
      auc += instance.auc;
    }
    const auto n = static_cast<double>(campaign.instances.size());
    accuracy /= n;
    auc /= n;
  } else {
    accuracy = campaign.instances.front().accuracy;
    auc = campaign.instances.front().auc;
    for (const InstanceResult& instance : campaign.instances) {
      accuracy = std::max(accuracy, instance.accuracy);
      auc = std::max(auc, instance.auc);
    }
  }
  campaign.accuracy = accuracy;
  campaign.auc = auc;
}

absl::StatusOr<InstanceResult> RunInstance(const Dataset& members,
                                           const Dataset& nonmembers,
                                           const EngineConfig& cfg,
                                           int instance_index) {
  absl::StatusOr<CampaignRunner> runner =
      CampaignRunner::Create(members, nonmembers, cfg);
  if (!runner.ok()) return runner.status();
  const int indices[] = {instance_index};
  absl::StatusOr<std::vector<InstanceResult>> instances =
      runner->Run(indices, nullptr);
  if (!instances.ok()) return instances.status();
  return std::move(instances->front());
}

absl::StatusOr<CampaignResult> RunCampaign(const Dataset& members,
                                           const Dataset& nonmembers,
                                           const EngineConfig& cfg,
                                           std::string experiment_name) {
  absl::StatusOr<CampaignRunner> runner =
      CampaignRunner::Create(members, nonmembers, cfg);
  if (!runner.ok()) return runner.status();
  CampaignResult campaign;
  campaign.experiment = std::move(experiment_name);
  campaign.config = cfg;
  const std::vector<int> indices = Iota(cfg.n_instances);
  absl::StatusOr<std::vector<InstanceResult>> instances =
      runner->Run(indices, &campaign.warnings);
  if (!instances.ok()) return instances.status();
  campaign.instances = *std::move(instances);
  AggregateCampaign(campaign, cfg.aggregation);
  return campaign;
}

absl::StatusOr<CampaignResult> RunBaselineSingle(const Dataset& members,
                                                 const Dataset& nonmembers,
                                                 const EngineConfig& cfg,
                                                 std::string experiment_name) {
  EngineConfig single = cfg;
  single.subset_size = cfg.instance_sample_per_side;
  absl::StatusOr<CampaignResult> campaign =
      RunCampaign(members, nonmembers, single, std::move(experiment_name));
  if (campaign.ok()) campaign->config = cfg;
  return campaign;
}

absl::StatusOr<CampaignResult> RunExperiment(const Dataset& members,
                                             const Dataset& nonmembers,
                                             const EngineConfig& cfg,
                                             const ExperimentSpec& experiment) {
  EngineConfig filtered = cfg;
  filtered.class_filter = experiment.class_labels;
  for (int label : experiment.class_labels) {
    if (label >= members.num_classes()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "experiment ", experiment.name, " refers to class ", label,
          " but the data has ", members.num_classes(), " classes"));
    }
  }
  const Dataset m = members.FilterByLabel(experiment.class_labels);
  const Dataset n = nonmembers.FilterByLabel(experiment.class_labels);
  if (m.empty() || n.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "experiment ", experiment.name, ": no ",
        m.empty() ? "member" : "non-member", " records with the given labels"));
  }
  return experiment.many_models
             ? RunCampaign(m, n, filtered, experiment.name)
             : RunBaselineSingle(m, n, filtered, experiment.name);
}

std::vector<MembershipVote> MajorityVote(
    std::span<const std::vector<bool>> votes) {
  if (votes.empty()) return {};
  std::vector<MembershipVote> out(votes.front().size());
  for (size_t r = 0; r < out.size(); ++r) {
    size_t members = 0;
    for (const std::vector<bool>& model_votes : votes) {
      members += model_votes[r];
    }
    out[r].vote_fraction =
        static_cast<double>(members) / static_cast<double>(votes.size());
    out[r].member = out[r].vote_fraction > 0.5;
  }
  return out;
}

absl::StatusOr<std::vector<MembershipVote>> InferMembership(
    std::span<const TrainedAttackModel> models, const Dataset& unknown,
    const FeatureSpec& features) {
  if (models.empty()) {
    return absl::InvalidArgumentError("no attack models to vote");
  }
  absl::StatusOr<FeatureMatrix> m = BuildFeatureMatrix(unknown, features);
  if (!m.ok()) return m.status();
  std::vector<std::vector<bool>> votes;
  votes.reserve(models.size());
  for (const TrainedAttackModel& model : models) {
    absl::StatusOr<std::vector<bool>> predictions =
        PredictMembership(model, *m);
    if (!predictions.ok()) return predictions.status();
    votes.push_back(*std::move(predictions));
  }
  return MajorityVote(votes);
}

std::vector<TrainedAttackModel> CollectModels(const CampaignResult& campaign) {
  std::vector<TrainedAttackModel> models;
  for (const InstanceResult& instance : campaign.instances) {
    for (const PairResult& pair : instance.pairs) {
      if (pair.best().model.has_value()) models.push_back(*pair.best().model);
    }
  }
  return models;
}

}  // namespace mia
