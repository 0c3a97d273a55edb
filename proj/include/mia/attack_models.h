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

// Binary attack classifiers. Each model scores a row with a membership score
// in [0, 1]; a score of at least 0.5 predicts "member".

#ifndef MIA_ATTACK_MODELS_H_
#define MIA_ATTACK_MODELS_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mia/features.h"
#include "mia/preprocess.h"
#include "mia/rng.h"

namespace mia {

enum class ClassifierKind { kDecisionTree, kRandomForest, kKnn, kLogistic };

// "tree", "forest", "knn", "logistic".
absl::string_view ClassifierKindName(ClassifierKind kind);
absl::StatusOr<ClassifierKind> ParseClassifierKind(absl::string_view name);

struct TreeParams {
  int max_depth = 5;
  int min_leaf = 2;
  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct ForestParams {
  int n_trees = 50;
  bool bootstrap = true;
  int max_depth = 5;
  int min_leaf = 2;
  // Features considered per split; 0 means ceil(sqrt(d)).
  int max_features = 0;
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct KnnParams {
  int k = 5;
  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct LogisticParams {
  double learning_rate = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
  friend bool operator==(const LogisticParams&,
                         const LogisticParams&) = default;
};

struct AttackModelSpec {
  ClassifierKind kind = ClassifierKind::kDecisionTree;
  TreeParams tree;
  ForestParams forest;
  KnnParams knn;
  LogisticParams logistic;
  ScalerSpec scaler;
  // Matrix column names fed to the classifier, in order.
  std::vector<std::string> feature_columns;

  absl::Status Validate() const;
  friend bool operator==(const AttackModelSpec&,
                         const AttackModelSpec&) = default;
};

struct TreeNode {
  // Internal node: rows with value <= threshold go left. Leaf: feature < 0.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Member fraction of the training rows reaching this node.
  double score = 0.0;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Score(std::span<const double> row) const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  friend bool operator==(const RandomForest&, const RandomForest&) = default;
};

struct KnnModel {
  int k = 5;
  size_t dims = 0;
  std::vector<double> points;  // row-major, scaled training rows
  std::vector<bool> member;
  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

using ClassifierState =
    std::variant<DecisionTree, RandomForest, KnnModel, LogisticModel>;

struct TrainedAttackModel {
  AttackModelSpec spec;
  FittedScaler scaler;
  ClassifierState classifier;
  // FNV-1a hash of the training row ids.
  uint64_t train_fingerprint = 0;
  friend bool operator==(const TrainedAttackModel&,
                         const TrainedAttackModel&) = default;
};

uint64_t FingerprintRows(std::span<const std::string> row_ids);

// CART with Gini impurity on rows `rows` (duplicates allowed, as produced by
// bootstrapping). `labels[i]` is the membership of row i of the row-major
// `values` matrix with `dims` columns. When `features_per_split` < dims a
// random feature subset is drawn from `rng` at every node. Among equal-Gini
// splits the lowest column index, then the lowest threshold, wins.
DecisionTree FitDecisionTree(std::span<const double> values, size_t dims,
                             const std::vector<bool>& labels,
                             std::vector<size_t> rows, int max_depth,
                             int min_leaf, size_t features_per_split,
                             RandomStream* rng);

// Fits the scaler on `train` then the classifier on the scaled feature
// columns. Randomness (bootstraps, feature sampling, logistic init) comes
// from `rng` only.
absl::StatusOr<TrainedAttackModel> FitAttackModel(const AttackModelSpec& spec,
                                                  const FeatureMatrix& train,
                                                  RandomStream& rng);

absl::StatusOr<std::vector<double>> ScoreSamples(
    const TrainedAttackModel& model, const FeatureMatrix& eval);

absl::StatusOr<std::vector<bool>> PredictMembership(
    const TrainedAttackModel& model, const FeatureMatrix& eval);

}  // namespace mia

#endif  // MIA_ATTACK_MODELS_H_
