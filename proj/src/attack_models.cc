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

#include "mia/attack_models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"

namespace mia {
namespace {

struct SplitCandidate {
  bool found = false;
  size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;  // sum over children of n_child * gini_child
};

// n * gini for a node with `members` of `n` rows.
double WeightedGini(double members, double n) {
  if (n <= 0.0) return 0.0;
  const double nonmembers = n - members;
  return n - (members * members + nonmembers * nonmembers) / n;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const double> values, size_t dims,
              const std::vector<bool>& labels, int max_depth, int min_leaf,
              size_t features_per_split, RandomStream* rng)
      : values_(values),
        dims_(dims),
        labels_(labels),
        max_depth_(max_depth),
        min_leaf_(static_cast<size_t>(std::max(min_leaf, 1))),
        features_per_split_(std::clamp<size_t>(features_per_split, 1, dims)),
        rng_(rng) {}

  DecisionTree Build(std::vector<size_t> rows) {
    tree_.nodes.clear();
    Grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int Grow(std::vector<size_t>& rows, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    size_t members = 0;
    for (size_t r : rows) members += labels_[r];
    const double n = static_cast<double>(rows.size());
    tree_.nodes[index].score = rows.empty() ? 0.0 : members / n;

    if (depth >= max_depth_ || rows.size() < 2 * min_leaf_ || members == 0 ||
        members == rows.size()) {
      return index;
    }
    const SplitCandidate split = FindSplit(rows, static_cast<double>(members));
    if (!split.found ||
        split.impurity >=
            WeightedGini(static_cast<double>(members), n) - 1e-12) {
      return index;
    }
    std::vector<size_t> left;
    std::vector<size_t> right;
    for (size_t r : rows) {
      (values_[r * dims_ + split.feature] <= split.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int left_index = Grow(left, depth + 1);
    const int right_index = Grow(right, depth + 1);
    TreeNode& node = tree_.nodes[index];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = left_index;
    node.right = right_index;
    return index;
  }

  std::vector<size_t> CandidateFeatures() {
    std::vector<size_t> features(dims_);
    std::iota(features.begin(), features.end(), size_t{0});
    if (features_per_split_ >= dims_ || rng_ == nullptr) return features;
    // Partial Fisher-Yates, then restore index order for tie-breaking.
    for (size_t i = 0; i < features_per_split_; ++i) {
      std::uniform_int_distribution<size_t> pick(i, dims_ - 1);
      std::swap(features[i], features[pick(*rng_)]);
    }
    features.resize(features_per_split_);
    std::sort(features.begin(), features.end());
    return features;
  }

  SplitCandidate FindSplit(const std::vector<size_t>& rows,
                           double total_members) {
    SplitCandidate best;
    const size_t n = rows.size();
    column_.resize(n);
    for (size_t f : CandidateFeatures()) {
      for (size_t i = 0; i < n; ++i) {
        column_[i] = {values_[rows[i] * dims_ + f], labels_[rows[i]]};
      }
      std::sort(column_.begin(), column_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_members = 0.0;
      for (size_t i = 1; i < n; ++i) {
        left_members += column_[i - 1].second;
        if (column_[i - 1].first == column_[i].first) continue;
        if (i < min_leaf_ || n - i < min_leaf_) continue;
        const double left_n = static_cast<double>(i);
        const double right_n = static_cast<double>(n - i);
        const double impurity =
            WeightedGini(left_members, left_n) +
            WeightedGini(total_members - left_members, right_n);
        if (!best.found || impurity < best.impurity) {
          const double lo = column_[i - 1].first;
          const double hi = column_[i].first;
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best = {true, f, threshold, impurity};
        }
      }
    }
    return best;
  }

  std::span<const double> values_;
  size_t dims_;
  const std::vector<bool>& labels_;
  int max_depth_;
  size_t min_leaf_;
  size_t features_per_split_;
  RandomStream* rng_;
  DecisionTree tree_;
  std::vector<std::pair<double, bool>> column_;
};

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticLogit(const LogisticModel& model, std::span<const double> row) {
  double z = model.bias;
  for (size_t j = 0; j < row.size(); ++j) z += model.weights[j] * row[j];
  return z;
}

LogisticModel FitLogistic(const FeatureMatrix& x,
                          const std::vector<bool>& labels,
                          const LogisticParams& params, RandomStream& rng) {
  const size_t n = x.rows();
  const size_t d = x.cols();
  LogisticModel model;
  model.weights.resize(d);
  std::uniform_real_distribution<double> init(-0.01, 0.01);
  for (double& w : model.weights) w = init(rng);
  std::vector<double> grad(d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double residual =
          Sigmoid(LogisticLogit(model, row)) - (labels[i] ? 1.0 : 0.0);
      for (size_t j = 0; j < d; ++j) grad[j] += residual * row[j];
      grad_bias += residual;
    }
    for (size_t j = 0; j < d; ++j) {
      model.weights[j] -= params.learning_rate *
                          (grad[j] * inv_n + params.l2 * model.weights[j]);
    }
    model.bias -= params.learning_rate * grad_bias * inv_n;
  }
  return model;
}

double KnnScore(const KnnModel& model, std::span<const double> row,
                std::vector<std::pair<double, size_t>>& scratch) {
  const size_t n = model.member.size();
  scratch.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double* p = model.points.data() + i * model.dims;
    double dist = 0.0;
    for (size_t j = 0; j < model.dims; ++j) {
      const double diff = p[j] - row[j];
      dist += diff * diff;
    }
    scratch[i] = {dist, i};
  }
  const size_t k = std::min(static_cast<size_t>(model.k), n);
  // Pairs compare by distance then row order.
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<long>(k),
                    scratch.end());
  size_t members = 0;
  for (size_t i = 0; i < k; ++i) members += model.member[scratch[i].second];
  return static_cast<double>(members) / static_cast<double>(k);
}

}  // namespace

absl::string_view ClassifierKindName(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kDecisionTree:
      return "tree";
    case ClassifierKind::kRandomForest:
      return "forest";
    case ClassifierKind::kKnn:
      return "knn";
    case ClassifierKind::kLogistic:
      return "logistic";
  }
  return "tree";
}

absl::StatusOr<ClassifierKind> ParseClassifierKind(absl::string_view name) {
  if (name == "tree" || name == "decision_tree") {
    return ClassifierKind::kDecisionTree;
  }
  if (name == "forest" || name == "random_forest") {
    return ClassifierKind::kRandomForest;
  }
  if (name == "knn") return ClassifierKind::kKnn;
  if (name == "logistic") return ClassifierKind::kLogistic;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown classifier '", name, "' (expected tree|forest|knn|logistic)"));
}

absl::Status AttackModelSpec::Validate() const {
  if (feature_columns.empty()) {
    return absl::InvalidArgumentError("attack model has no feature columns");
  }
  const bool positive = tree.max_depth > 0 && tree.min_leaf > 0 &&
                        forest.n_trees > 0 && forest.max_depth > 0 &&
                        forest.min_leaf > 0 && forest.max_features >= 0 &&
                        knn.k > 0 && logistic.learning_rate > 0 &&
                        logistic.iterations > 0 && logistic.l2 >= 0;
  if (!positive) {
    return absl::InvalidArgumentError("attack model hyperparameters invalid");
  }
  return absl::OkStatus();
}

double DecisionTree::Score(std::span<const double> row) const {
  int index = 0;
  while (nodes[static_cast<size_t>(index)].feature >= 0) {
    const TreeNode& node = nodes[static_cast<size_t>(index)];
    index = row[static_cast<size_t>(node.feature)] <= node.threshold
                ? node.left
                : node.right;
  }
  return nodes[static_cast<size_t>(index)].score;
}

uint64_t FingerprintRows(std::span<const std::string> row_ids) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::string& id : row_ids) {
    for (unsigned char c : id) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // separator
    h *= 0x100000001b3ULL;
  }
  return h;
}

DecisionTree FitDecisionTree(std::span<const double> values, size_t dims,
                             const std::vector<bool>& labels,
                             std::vector<size_t> rows, int max_depth,
                             int min_leaf, size_t features_per_split,
                             RandomStream* rng) {
  TreeBuilder builder(values, dims, labels, max_depth, min_leaf,
                      features_per_split, rng);
  return builder.Build(std::move(rows));
}

absl::StatusOr<TrainedAttackModel> FitAttackModel(const AttackModelSpec& spec,
                                                  const FeatureMatrix& train,
                                                  RandomStream& rng) {
  if (absl::Status status = spec.Validate(); !status.ok()) return status;
  if (!train.has_membership()) {
    return absl::InvalidArgumentError("training matrix has no membership");
  }
  const std::vector<bool>& labels = *train.row_membership();
  const auto members = std::count(labels.begin(), labels.end(), true);
  if (members == 0 || static_cast<size_t>(members) == labels.size()) {
    return absl::InvalidArgumentError(
        "training set must contain members and non-members");
  }
  absl::StatusOr<FeatureMatrix> selected =
      train.SelectColumns(spec.feature_columns);
  if (!selected.ok()) return selected.status();
  absl::StatusOr<FittedScaler> scaler = FitScaler(spec.scaler, *selected);
  if (!scaler.ok()) return scaler.status();
  absl::StatusOr<FeatureMatrix> x = ApplyScaler(*scaler, *selected);
  if (!x.ok()) return x.status();

  TrainedAttackModel model;
  model.spec = spec;
  model.scaler = *std::move(scaler);
  model.train_fingerprint = FingerprintRows(train.row_ids());

  const size_t n = x->rows();
  const size_t d = x->cols();
  std::vector<size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), size_t{0});

  switch (spec.kind) {
    case ClassifierKind::kDecisionTree:
      model.classifier =
          FitDecisionTree(x->values(), d, labels, all_rows, spec.tree.max_depth,
                          spec.tree.min_leaf, d, nullptr);
      break;
    case ClassifierKind::kRandomForest: {
      const ForestParams& p = spec.forest;
      const size_t per_split = p.max_features > 0
                                   ? static_cast<size_t>(p.max_features)
                                   : static_cast<size_t>(std::ceil(
                                         std::sqrt(static_cast<double>(d))));
      RandomForest forest;
      forest.trees.reserve(static_cast<size_t>(p.n_trees));
      std::uniform_int_distribution<size_t> pick(0, n - 1);
      for (int t = 0; t < p.n_trees; ++t) {
        std::vector<size_t> rows = all_rows;
        if (p.bootstrap) {
          for (size_t& r : rows) r = pick(rng);
        }
        forest.trees.push_back(FitDecisionTree(x->values(), d, labels,
                                               std::move(rows), p.max_depth,
                                               p.min_leaf, per_split, &rng));
      }
      model.classifier = std::move(forest);
      break;
    }
    case ClassifierKind::kKnn: {
      KnnModel knn;
      knn.k = spec.knn.k;
      knn.dims = d;
      knn.points.assign(x->values().begin(), x->values().end());
      knn.member = labels;
      model.classifier = std::move(knn);
      break;
    }
    case ClassifierKind::kLogistic:
      model.classifier = FitLogistic(*x, labels, spec.logistic, rng);
      break;
  }
  return model;
}

absl::StatusOr<std::vector<double>> ScoreSamples(
    const TrainedAttackModel& model, const FeatureMatrix& eval) {
  absl::StatusOr<FeatureMatrix> selected =
      eval.SelectColumns(model.spec.feature_columns);
  if (!selected.ok()) return selected.status();
  absl::StatusOr<FeatureMatrix> x = ApplyScaler(model.scaler, *selected);
  if (!x.ok()) return x.status();

  std::vector<double> scores(x->rows());
  std::vector<std::pair<double, size_t>> scratch;
  for (size_t r = 0; r < x->rows(); ++r) {
    const auto row = x->row(r);
    scores[r] = std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, DecisionTree>) {
            return c.Score(row);
          } else if constexpr (std::is_same_v<T, RandomForest>) {
            double sum = 0.0;
            for (const DecisionTree& tree : c.trees) sum += tree.Score(row);
            return sum / static_cast<double>(c.trees.size());
          } else if constexpr (std::is_same_v<T, KnnModel>) {
            return KnnScore(c, row, scratch);
          } else {
            return Sigmoid(LogisticLogit(c, row));
          }
        },
        model.classifier);
  }
  return scores;
}

absl::StatusOr<std::vector<bool>> PredictMembership(
    const TrainedAttackModel& model, const FeatureMatrix& eval) {
  absl::StatusOr<std::vector<double>> scores = ScoreSamples(model, eval);
  if (!scores.ok()) return scores.status();
  std::vector<bool> out(scores->size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = (*scores)[i] >= 0.5;
  return out;
}

}  // namespace mia
