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

#include "mia/report.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace mia {
namespace {

Json OptionalReal(const std::optional<double>& value) {
  return value.has_value() ? Json(*value) : Json(nullptr);
}

absl::StatusOr<double> RealField(const Json& object, const char* key,
                                 const std::string& where) {
  if (!object.is_object() || !object.contains(key) ||
      !object[key].is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ": missing numeric field '", key, "'"));
  }
  return object[key].get<double>();
}

}  // namespace

Json ConfigToJson(const EngineConfig& cfg) {
  Json j;
  j["subset_size"] = cfg.subset_size;
  j["runs_per_pair"] = cfg.runs_per_pair;
  j["n_instances"] = cfg.n_instances;
  j["instance_sample_per_side"] = cfg.instance_sample_per_side;
  j["features"] = cfg.feature_spec.Names();
  Json scalers = Json::array();
  bool per_class = true;
  for (const ScalerSpec& s : cfg.scaler_grid) {
    scalers.push_back(std::string(ScalerKindName(s.kind)));
    per_class &= s.per_class;
  }
  j["scalers"] = std::move(scalers);
  j["per_class_scaling"] = per_class;
  Json classifiers = Json::array();
  for (ClassifierKind k : cfg.classifier_grid) {
    classifiers.push_back(std::string(ClassifierKindName(k)));
  }
  j["classifiers"] = std::move(classifiers);
  j["aggregation"] = std::string(AggregationName(cfg.aggregation));
  const AttackModelSpec& m = cfg.model_template;
  j["hyperparameters"] = {
      {"tree",
       {{"max_depth", m.tree.max_depth}, {"min_leaf", m.tree.min_leaf}}},
      {"forest",
       {{"n_trees", m.forest.n_trees},
        {"bootstrap", m.forest.bootstrap},
        {"max_depth", m.forest.max_depth},
        {"min_leaf", m.forest.min_leaf},
        {"max_features", m.forest.max_features}}},
      {"knn", {{"k", m.knn.k}}},
      {"logistic",
       {{"learning_rate", m.logistic.learning_rate},
        {"iterations", m.logistic.iterations},
        {"l2", m.logistic.l2}}}};
  return j;
}

Json CampaignToJson(const CampaignResult& campaign) {
  Json instances = Json::array();
  for (const InstanceResult& instance : campaign.instances) {
    Json pairs = Json::array();
    for (const PairResult& pair : instance.pairs) {
      const RunResult& best = pair.best();
      Json run;
      run["run"] = best.run_index;
      run["scaler"] = std::string(ScalerKindName(best.winner.scaler.kind));
      run["classifier"] =
          std::string(ClassifierKindName(best.winner.classifier));
      run["features"] = best.winner.features;
      run["accuracy"] = best.score.accuracy;
      run["auc"] = best.score.auc;
      Json p;
      p["index"] = pair.pair_index;
      p["best_run"] = std::move(run);
      pairs.push_back(std::move(p));
    }
    Json i;
    i["index"] = instance.instance_index;
    i["accuracy"] = instance.accuracy;
    i["auc"] = instance.auc;
    i["pairs"] = std::move(pairs);
    instances.push_back(std::move(i));
  }
  Json aggregate;
  aggregate["accuracy"] = OptionalReal(campaign.accuracy);
  aggregate["auc"] = OptionalReal(campaign.auc);
  aggregate["mode"] = std::string(AggregationName(campaign.config.aggregation));
  Json j;
  j["aggregate"] = std::move(aggregate);
  j["instances"] = std::move(instances);
  return j;
}

Json ReportToJson(const AuditReport& report) {
  Json experiments = Json::object();
  for (const CampaignResult& campaign : report.experiments) {
    experiments[campaign.experiment] = CampaignToJson(campaign);
  }
  Json j;
  j["config"] = ConfigToJson(report.config);
  j["seed"] = report.config.seed;
  j["experiments"] = std::move(experiments);
  return j;
}

std::string FormatReport(const AuditReport& report) {
  return DumpJson(ReportToJson(report), 2) + "\n";
}

absl::Status WriteReport(const AuditReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << FormatReport(report);
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<Json> ReadReport(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j = Json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed JSON"));
  }
  return j;
}

absl::Status VerifyReport(const Json& report) {
  if (!report.is_object() || !report.contains("experiments") ||
      !report["experiments"].is_object()) {
    return absl::InvalidArgumentError("report has no 'experiments' object");
  }
  for (const auto& [name, experiment] : report["experiments"].items()) {
    if (!experiment.contains("instances") ||
        !experiment["instances"].is_array() ||
        !experiment.contains("aggregate")) {
      return absl::InvalidArgumentError(
          absl::StrCat(name, ": missing instances or aggregate"));
    }
    std::vector<double> accuracies;
    std::vector<double> aucs;
    for (const Json& instance : experiment["instances"]) {
      const std::string where =
          absl::StrCat(name, " instance ", instance.value("index", -1));
      if (!instance.contains("pairs") || !instance["pairs"].is_array() ||
          instance["pairs"].empty()) {
        return absl::InvalidArgumentError(absl::StrCat(where, ": no pairs"));
      }
      double accuracy = 0.0;
      double auc = 0.0;
      for (const Json& pair : instance["pairs"]) {
        const Json& best =
            pair.contains("best_run") ? pair["best_run"] : Json();
        absl::StatusOr<double> a = RealField(best, "accuracy", where);
        if (!a.ok()) return a.status();
        absl::StatusOr<double> u = RealField(best, "auc", where);
        if (!u.ok()) return u.status();
        accuracy += *a;
        auc += *u;
      }
      const auto n = static_cast<double>(instance["pairs"].size());
      absl::StatusOr<double> stated_accuracy =
          RealField(instance, "accuracy", where);
      if (!stated_accuracy.ok()) return stated_accuracy.status();
      absl::StatusOr<double> stated_auc = RealField(instance, "auc", where);
      if (!stated_auc.ok()) return stated_auc.status();
      if (accuracy / n != *stated_accuracy || auc / n != *stated_auc) {
        return absl::DataLossError(absl::StrCat(
            where, ": instance scores are not the mean of its pairs"));
      }
      accuracies.push_back(*stated_accuracy);
      aucs.push_back(*stated_auc);
    }

    const Json& aggregate = experiment["aggregate"];
    const std::string mode = aggregate.value("mode", "");
    if (accuracies.empty()) {
      if (!aggregate["accuracy"].is_null() || !aggregate["auc"].is_null()) {
        return absl::DataLossError(
            absl::StrCat(name, ": aggregate of zero instances must be null"));
      }
      continue;
    }
    double accuracy = 0.0;
    double auc = 0.0;
    if (mode == "average") {
      for (double v : accuracies) accuracy += v;
      for (double v : aucs) auc += v;
      accuracy /= static_cast<double>(accuracies.size());
      auc /= static_cast<double>(aucs.size());
    } else if (mode == "best") {
      accuracy = *std::max_element(accuracies.begin(), accuracies.end());
      auc = *std::max_element(aucs.begin(), aucs.end());
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat(name, ": unknown aggregate mode '", mode, "'"));
    }
    absl::StatusOr<double> stated_accuracy =
        RealField(aggregate, "accuracy", name);
    if (!stated_accuracy.ok()) return stated_accuracy.status();
    absl::StatusOr<double> stated_auc = RealField(aggregate, "auc", name);
    if (!stated_auc.ok()) return stated_auc.status();
    if (accuracy != *stated_accuracy || auc != *stated_auc) {
      return absl::DataLossError(
          absl::StrCat(name, ": aggregate does not follow from its instances"));
    }
  }
  return absl::OkStatus();
}

}  // namespace mia
