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

#include "mia/ensemble_io.h"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace mia {
namespace {

Json StatsToJson(const std::vector<ColumnStatistics>& stats) {
  Json out = Json::array();
  for (const ColumnStatistics& s : stats) out.push_back({s.location, s.spread});
  return out;
}

std::vector<ColumnStatistics> StatsFromJson(const Json& j) {
  std::vector<ColumnStatistics> out;
  for (const Json& s : j) {
    out.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  }
  return out;
}

Json TreeToJson(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.score});
  }
  return nodes;
}

DecisionTree TreeFromJson(const Json& j) {
  DecisionTree tree;
  for (const Json& n : j) {
    tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(),
                          n.at(2).get<int>(), n.at(3).get<int>(),
                          n.at(4).get<double>()});
  }
  return tree;
}

absl::Status CheckTree(const DecisionTree& tree, size_t dims) {
  if (tree.nodes.empty()) return absl::InvalidArgumentError("empty tree");
  const auto size = static_cast<int>(tree.nodes.size());
  for (int i = 0; i < size; ++i) {
    const TreeNode& n = tree.nodes[static_cast<size_t>(i)];
    if (n.feature < 0) continue;
    // Children are stored after their parent, which rules out cycles.
    if (static_cast<size_t>(n.feature) >= dims || n.left <= i || n.right <= i ||
        n.left >= size || n.right >= size) {
      return absl::InvalidArgumentError("malformed tree node");
    }
  }
  return absl::OkStatus();
}

}  // namespace

Json ModelToJson(const TrainedAttackModel& model) {
  const AttackModelSpec& s = model.spec;
  Json spec;
  spec["kind"] = std::string(ClassifierKindName(s.kind));
  spec["scaler"] = {{"kind", std::string(ScalerKindName(s.scaler.kind))},
                    {"per_class", s.scaler.per_class}};
  spec["feature_columns"] = s.feature_columns;
  spec["tree"] = {{"max_depth", s.tree.max_depth},
                  {"min_leaf", s.tree.min_leaf}};
  spec["forest"] = {{"n_trees", s.forest.n_trees},
                    {"bootstrap", s.forest.bootstrap},
                    {"max_depth", s.forest.max_depth},
                    {"min_leaf", s.forest.min_leaf},
                    {"max_features", s.forest.max_features}};
  spec["knn"] = {{"k", s.knn.k}};
  spec["logistic"] = {{"learning_rate", s.logistic.learning_rate},
                      {"iterations", s.logistic.iterations},
                      {"l2", s.logistic.l2}};

  Json scaler;
  scaler["columns"] = model.scaler.columns;
  Json flags = Json::array();
  for (bool b : model.scaler.class_scaled) flags.push_back(b);
  scaler["class_scaled"] = std::move(flags);
  scaler["global"] = StatsToJson(model.scaler.global);
  Json per_class = Json::array();
  for (const auto& [label, stats] : model.scaler.per_class) {
    per_class.push_back({{"label", label}, {"stats", StatsToJson(stats)}});
  }
  scaler["per_class"] = std::move(per_class);

  Json classifier = std::visit(
      [](const auto& c) -> Json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          return {{"nodes", TreeToJson(c)}};
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          Json trees = Json::array();
          for (const DecisionTree& t : c.trees) trees.push_back(TreeToJson(t));
          return {{"trees", std::move(trees)}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          Json member = Json::array();
          for (bool b : c.member) member.push_back(b);
          return {{"k", c.k},
                  {"dims", c.dims},
                  {"points", c.points},
                  {"member", std::move(member)}};
        } else {
          return {{"weights", c.weights}, {"bias", c.bias}};
        }
      },
      model.classifier);

  char fingerprint[17];
  std::snprintf(fingerprint, sizeof(fingerprint), "%016" PRIx64,
                model.train_fingerprint);
  Json j;
  j["spec"] = std::move(spec);
  j["scaler"] = std::move(scaler);
  j["classifier"] = std::move(classifier);
  j["train_fingerprint"] = fingerprint;
  return j;
}

absl::StatusOr<TrainedAttackModel> ModelFromJson(const Json& j) {
  TrainedAttackModel model;
  try {
    const Json& spec = j.at("spec");
    absl::StatusOr<ClassifierKind> kind =
        ParseClassifierKind(spec.at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    absl::StatusOr<ScalerKind> scaler_kind =
        ParseScalerKind(spec.at("scaler").at("kind").get<std::string>());
    if (!scaler_kind.ok()) return scaler_kind.status();
    AttackModelSpec& s = model.spec;
    s.kind = *kind;
    s.scaler = {*scaler_kind, spec.at("scaler").at("per_class").get<bool>()};
    s.feature_columns =
        spec.at("feature_columns").get<std::vector<std::string>>();
    s.tree = {spec.at("tree").at("max_depth").get<int>(),
              spec.at("tree").at("min_leaf").get<int>()};
    const Json& forest = spec.at("forest");
    s.forest = {
        forest.at("n_trees").get<int>(), forest.at("bootstrap").get<bool>(),
        forest.at("max_depth").get<int>(), forest.at("min_leaf").get<int>(),
        forest.at("max_features").get<int>()};
    s.knn = {spec.at("knn").at("k").get<int>()};
    const Json& logistic = spec.at("logistic");
    s.logistic = {logistic.at("learning_rate").get<double>(),
                  logistic.at("iterations").get<int>(),
                  logistic.at("l2").get<double>()};
    if (absl::Status status = s.Validate(); !status.ok()) return status;

    const Json& scaler = j.at("scaler");
    model.scaler.spec = s.scaler;
    model.scaler.columns = scaler.at("columns").get<std::vector<std::string>>();
    for (const Json& b : scaler.at("class_scaled")) {
      model.scaler.class_scaled.push_back(b.get<bool>());
    }
    model.scaler.global = StatsFromJson(scaler.at("global"));
    for (const Json& entry : scaler.at("per_class")) {
      model.scaler.per_class.emplace(entry.at("label").get<int>(),
                                     StatsFromJson(entry.at("stats")));
    }
    const size_t dims = s.feature_columns.size();
    if (model.scaler.columns != s.feature_columns ||
        model.scaler.class_scaled.size() != dims ||
        model.scaler.global.size() != dims) {
      return absl::InvalidArgumentError("scaler does not match model columns");
    }
    for (const auto& [label, stats] : model.scaler.per_class) {
      if (stats.size() != dims) {
        return absl::InvalidArgumentError("per-class scaler size mismatch");
      }
    }

    const Json& c = j.at("classifier");
    switch (s.kind) {
      case ClassifierKind::kDecisionTree: {
        DecisionTree tree = TreeFromJson(c.at("nodes"));
        if (absl::Status st = CheckTree(tree, dims); !st.ok()) return st;
        model.classifier = std::move(tree);
        break;
      }
      case ClassifierKind::kRandomForest: {
        RandomForest forest_model;
        for (const Json& t : c.at("trees")) {
          DecisionTree tree = TreeFromJson(t);
          if (absl::Status st = CheckTree(tree, dims); !st.ok()) return st;
          forest_model.trees.push_back(std::move(tree));
        }
        if (forest_model.trees.empty()) {
          return absl::InvalidArgumentError("forest has no trees");
        }
        model.classifier = std::move(forest_model);
        break;
      }
      case ClassifierKind::kKnn: {
        KnnModel knn;
        knn.k = c.at("k").get<int>();
        knn.dims = c.at("dims").get<size_t>();
        knn.points = c.at("points").get<std::vector<double>>();
        for (const Json& b : c.at("member"))
          knn.member.push_back(b.get<bool>());
        if (knn.dims != dims || knn.member.empty() ||
            knn.points.size() != knn.member.size() * dims) {
          return absl::InvalidArgumentError("malformed knn model");
        }
        model.classifier = std::move(knn);
        break;
      }
      case ClassifierKind::kLogistic: {
        LogisticModel logistic_model;
        logistic_model.weights = c.at("weights").get<std::vector<double>>();
        logistic_model.bias = c.at("bias").get<double>();
        if (logistic_model.weights.size() != dims) {
          return absl::InvalidArgumentError("malformed logistic model");
        }
        model.classifier = std::move(logistic_model);
        break;
      }
    }
    model.train_fingerprint =
        std::stoull(j.at("train_fingerprint").get<std::string>(), nullptr, 16);
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed attack model: ", e.what()));
  }
  return model;
}

absl::StatusOr<std::vector<TrainedAttackModel>> SavedEnsemble::Models(
    const std::string& experiment) const {
  for (const auto& [name, models] : experiments) {
    if (name == experiment) return models;
  }
  return absl::NotFoundError(
      absl::StrCat("ensemble has no experiment '", experiment, "'"));
}

absl::Status SaveEnsemble(const SavedEnsemble& ensemble,
                          const std::string& path) {
  Json experiments = Json::array();
  for (const auto& [name, models] : ensemble.experiments) {
    Json list = Json::array();
    for (const TrainedAttackModel& model : models) {
      list.push_back(ModelToJson(model));
    }
    experiments.push_back({{"name", name}, {"models", std::move(list)}});
  }
  Json j;
  j["format"] = "mia-ensemble";
  j["version"] = kEnsembleFormatVersion;
  j["num_classes"] = ensemble.num_classes;
  j["features"] = ensemble.features.Names();
  j["experiments"] = std::move(experiments);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << DumpJson(j) << '\n';
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<SavedEnsemble> LoadEnsemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const Json j = Json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed JSON"));
  }
  if (j.value("format", "") != "mia-ensemble") {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": not an ensemble file"));
  }
  if (j.value("version", 0) != kEnsembleFormatVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": unsupported ensemble version"));
  }
  SavedEnsemble ensemble;
  try {
    ensemble.num_classes = j.at("num_classes").get<int>();
    std::vector<Feature> parsed;
    for (const Json& name : j.at("features")) {
      absl::StatusOr<Feature> feature = ParseFeature(name.get<std::string>());
      if (!feature.ok()) return feature.status();
      parsed.push_back(*std::move(feature));
    }
    absl::StatusOr<FeatureSpec> features =
        FeatureSpec::Create(std::move(parsed));
    if (!features.ok()) return features.status();
    ensemble.features = *std::move(features);
    for (const Json& experiment : j.at("experiments")) {
      std::vector<TrainedAttackModel> models;
      for (const Json& m : experiment.at("models")) {
        absl::StatusOr<TrainedAttackModel> model = ModelFromJson(m);
        if (!model.ok()) return model.status();
        models.push_back(*std::move(model));
      }
      ensemble.experiments.emplace_back(
          experiment.at("name").get<std::string>(), std::move(models));
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": malformed ensemble: ", e.what()));
  }
  return ensemble;
}

}  // namespace mia
