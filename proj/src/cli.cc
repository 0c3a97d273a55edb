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

#include "mia/cli.h"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "mia/engine.h"
#include "mia/ensemble_io.h"
#include "mia/json_text.h"
#include "mia/records_io.h"
#include "mia/report.h"
#include "mia/synthetic.h"

namespace mia {
namespace {

// Console summaries only; reports keep full precision.
std::string Summary(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

struct AuditFlags {
  std::string members_path;
  std::string nonmembers_path;
  std::string records_path;
  int subset_size = 50;
  int runs = 5;
  int instances = 50;
  int sample_size = 1000;
  std::string features = absl::StrJoin(FeatureSpec::Default().Names(), ",");
  std::string scalers = "robust,minmax,standard";
  std::string classifiers = "tree,forest,knn,logistic";
  std::string aggregation = "average";
  bool per_class = false;
  std::string experiments = absl::StrJoin(DefaultExperiments(), ",");
  uint64_t seed = 0;
  int parallelism = 0;
  std::string output = "report.json";
  std::string save_models;
  std::string config_path;
};

struct SynthFlags {
  int classes = 2;
  int members = 2000;
  int nonmembers = 2000;
  double member_confidence = 20.0;
  double nonmember_confidence = 2.0;
  bool null = false;
  std::string label_distribution;
  uint64_t seed = 0;
  std::string out_members = "members.jsonl";
  std::string out_nonmembers = "nonmembers.jsonl";
};

struct InferFlags {
  std::string models_path;
  std::string unknown_path;
  std::string experiment;
  std::string output;
};

// Error raised while running a subcommand, tagged with its exit code.

std::vector<std::string> SplitCsv(const std::string& csv) {
  return absl::StrSplit(csv, ',', absl::SkipWhitespace());
}

// Values from a JSON config file fill every option not given on the command
// line. Keys are long flag names without dashes, e.g. "subset-size".
absl::Status ApplyConfigFile(const std::string& path, CLI::App& command) {
  std::ifstream in(path);
  if (!in)
    return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const Json j = Json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": config must be a JSON object"));
  }
  for (const auto& [key, value] : j.items()) {
    CLI::Option* option = nullptr;
    try {
      option = command.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": unknown config key '", key, "'"));
    }
    if (key == "config") {
      return absl::InvalidArgumentError("config files cannot nest");
    }
    if (option->count() > 0) continue;  // command line wins
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      std::vector<std::string> items;
      for (const Json& item : value) {
        items.push_back(item.is_string() ? item.get<std::string>()
                                         : DumpJson(item));
      }
      text = absl::StrJoin(items, ",");
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else {
      text = DumpJson(value);
    }
    try {
      option->add_result(text);
      option->run_callback();
    } catch (const CLI::Error& e) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": bad value for '", key, "': ", e.what()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<EngineConfig> BuildEngineConfig(const AuditFlags& flags) {
  EngineConfig cfg;
  cfg.subset_size = flags.subset_size;
  cfg.runs_per_pair = flags.runs;
  cfg.n_instances = flags.instances;
  cfg.instance_sample_per_side = flags.sample_size;
  absl::StatusOr<FeatureSpec> features = FeatureSpec::Parse(flags.features);
  if (!features.ok()) return features.status();
  cfg.feature_spec = *std::move(features);
  cfg.scaler_grid.clear();
  for (const std::string& name : SplitCsv(flags.scalers)) {
    absl::StatusOr<ScalerKind> kind = ParseScalerKind(name);
    if (!kind.ok()) return kind.status();
    cfg.scaler_grid.push_back({*kind, true});
  }
  cfg.classifier_grid.clear();
  for (const std::string& name : SplitCsv(flags.classifiers)) {
    absl::StatusOr<ClassifierKind> kind = ParseClassifierKind(name);
    if (!kind.ok()) return kind.status();
    cfg.classifier_grid.push_back(*kind);
  }
  absl::StatusOr<Aggregation> aggregation = ParseAggregation(flags.aggregation);
  if (!aggregation.ok()) return aggregation.status();
  cfg.aggregation = *aggregation;
  cfg.seed = flags.seed;
  cfg.parallelism = flags.parallelism;
  cfg.keep_models = !flags.save_models.empty();
  if (absl::Status status = cfg.Validate(); !status.ok()) return status;
  return cfg;
}

int Fail(std::ostream& err, int code, absl::string_view message) {
  err << "error: " << message << "\n";
  return code;
}

int RunAudit(const AuditFlags& flags, std::ostream& out, std::ostream& err) {
  absl::StatusOr<EngineConfig> cfg = BuildEngineConfig(flags);
  if (!cfg.ok()) return Fail(err, kExitConfigError, cfg.status().message());

  std::vector<ExperimentSpec> experiments;
  auto add_experiment = [&](const std::string& name) -> absl::Status {
    for (const ExperimentSpec& e : experiments) {
      if (e.name == name) return absl::OkStatus();
    }
    absl::StatusOr<ExperimentSpec> spec = ParseExperiment(name);
    if (!spec.ok()) return spec.status();
    experiments.push_back(*std::move(spec));
    return absl::OkStatus();
  };
  for (const std::string& name : SplitCsv(flags.experiments)) {
    if (absl::Status s = add_experiment(name); !s.ok()) {
      return Fail(err, kExitConfigError, s.message());
    }
  }

  const bool two_files =
      !flags.members_path.empty() || !flags.nonmembers_path.empty();
  if (two_files == !flags.records_path.empty()) {
    return Fail(err, kExitConfigError,
                "give either --members and --nonmembers, or --records");
  }
  if (two_files &&
      (flags.members_path.empty() || flags.nonmembers_path.empty())) {
    return Fail(err, kExitConfigError,
                "--members and --nonmembers must be given together");
  }
  absl::StatusOr<std::pair<Dataset, Dataset>> data =
      absl::InternalError("unset");
  if (two_files) {
    data = LoadMembershipPair(flags.members_path, flags.nonmembers_path);
  } else {
    absl::StatusOr<Dataset> all = LoadRecords(flags.records_path);
    data = all.ok() ? SplitByMembership(*all)
                    : absl::StatusOr<std::pair<Dataset, Dataset>>(all.status());
  }
  if (!data.ok()) return Fail(err, kExitDataError, data.status().message());
  const auto& [members, nonmembers] = *data;

  if (flags.per_class) {
    for (int k = 0; k < members.num_classes(); ++k) {
      for (const char* prefix : {"S-CL", "M-CL"}) {
        if (absl::Status s = add_experiment(absl::StrCat(prefix, k)); !s.ok()) {
          return Fail(err, kExitConfigError, s.message());
        }
      }
    }
  }
  if (experiments.empty()) {
    return Fail(err, kExitConfigError, "no experiments requested");
  }

  AuditReport report;
  report.config = *cfg;
  SavedEnsemble ensemble;
  ensemble.features = cfg->feature_spec;
  ensemble.num_classes = members.num_classes();
  for (const ExperimentSpec& experiment : experiments) {
    absl::StatusOr<CampaignResult> result =
        RunExperiment(members, nonmembers, *cfg, experiment);
    if (!result.ok()) {
      const bool data_problem = absl::IsFailedPrecondition(result.status()) ||
                                absl::IsInvalidArgument(result.status());
      return Fail(
          err, data_problem ? kExitDataError : kExitRuntimeError,
          absl::StrCat(experiment.name, ": ", result.status().message()));
    }
    for (const std::string& warning : result->warnings) {
      err << "warning: " << experiment.name << ": " << warning << "\n";
    }
    if (cfg->keep_models) {
      ensemble.experiments.emplace_back(experiment.name,
                                        CollectModels(*result));
      for (InstanceResult& instance : result->instances) {
        for (PairResult& pair : instance.pairs) {
          for (RunResult& run : pair.runs) run.model.reset();
        }
      }
    }
    out << experiment.name << "\taccuracy=" << Summary(*result->accuracy)
        << "\tauc=" << Summary(*result->auc) << "\n";
    report.experiments.push_back(*std::move(result));
  }
  if (absl::Status s = WriteReport(report, flags.output); !s.ok()) {
    return Fail(err, kExitRuntimeError, s.message());
  }
  if (cfg->keep_models) {
    if (absl::Status s = SaveEnsemble(ensemble, flags.save_models); !s.ok()) {
      return Fail(err, kExitRuntimeError, s.message());
    }
  }
  return kExitOk;
}

int RunSynth(const SynthFlags& flags, std::ostream& out, std::ostream& err) {
  SynthSpec spec;
  spec.num_classes = flags.classes;
  spec.n_members = flags.members;
  spec.n_nonmembers = flags.nonmembers;
  spec.member_confidence = flags.member_confidence;
  spec.nonmember_confidence =
      flags.null ? flags.member_confidence : flags.nonmember_confidence;
  spec.seed = flags.seed;
  for (const std::string& p : SplitCsv(flags.label_distribution)) {
    double value = 0.0;
    if (!absl::SimpleAtod(p, &value)) {
      return Fail(err, kExitConfigError,
                  absl::StrCat("bad label probability '", p, "'"));
    }
    spec.label_distribution.push_back(value);
  }
  if (absl::Status s = spec.Validate(); !s.ok()) {
    return Fail(err, kExitConfigError, s.message());
  }
  absl::StatusOr<std::pair<Dataset, Dataset>> data =
      GenerateSyntheticDataset(spec);
  if (!data.ok()) return Fail(err, kExitRuntimeError, data.status().message());
  if (absl::Status s = WriteRecords(data->first.records(), flags.out_members);
      !s.ok()) {
    return Fail(err, kExitRuntimeError, s.message());
  }
  if (absl::Status s =
          WriteRecords(data->second.records(), flags.out_nonmembers);
      !s.ok()) {
    return Fail(err, kExitRuntimeError, s.message());
  }
  out << "loss_threshold_accuracy="
      << Summary(LossThresholdOracle(data->first, data->second)) << "\n";
  return kExitOk;
}

int RunInfer(const InferFlags& flags, std::ostream& out, std::ostream& err) {
  absl::StatusOr<SavedEnsemble> ensemble = LoadEnsemble(flags.models_path);
  if (!ensemble.ok()) {
    return Fail(err, kExitDataError, ensemble.status().message());
  }
  if (ensemble->experiments.empty()) {
    return Fail(err, kExitDataError, "ensemble contains no experiments");
  }
  std::string experiment = flags.experiment;
  if (experiment.empty()) {
    experiment = ensemble->experiments.front().first;
    for (const auto& [name, unused] : ensemble->experiments) {
      if (name == "M-CL01") experiment = name;
    }
  }
  absl::StatusOr<std::vector<TrainedAttackModel>> models =
      ensemble->Models(experiment);
  if (!models.ok()) return Fail(err, kExitDataError, models.status().message());
  absl::StatusOr<Dataset> unknown = LoadRecords(flags.unknown_path);
  if (!unknown.ok()) {
    return Fail(err, kExitDataError, unknown.status().message());
  }
  if (unknown->num_classes() != ensemble->num_classes) {
    return Fail(
        err, kExitDataError,
        absl::StrCat("records have ", unknown->num_classes(),
                     " classes, ensemble expects ", ensemble->num_classes));
  }
  absl::StatusOr<std::vector<MembershipVote>> votes =
      InferMembership(*models, *unknown, ensemble->features);
  if (!votes.ok()) return Fail(err, kExitDataError, votes.status().message());

  std::ofstream file;
  if (!flags.output.empty()) {
    file.open(flags.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      return Fail(err, kExitRuntimeError,
                  absl::StrCat("cannot write ", flags.output));
    }
  }
  std::ostream& sink = flags.output.empty() ? out : file;
  for (size_t i = 0; i < votes->size(); ++i) {
    Json line;
    line["id"] = (*unknown)[i].id;
    line["vote_fraction"] = (*votes)[i].vote_fraction;
    line["member"] = (*votes)[i].member;
    sink << DumpJson(line) << "\n";
  }
  return kExitOk;
}

int RunVerify(const std::string& path, std::ostream& out, std::ostream& err) {
  absl::StatusOr<Json> report = ReadReport(path);
  if (!report.ok()) return Fail(err, kExitDataError, report.status().message());
  if (absl::Status s = VerifyReport(*report); !s.ok()) {
    return Fail(err, kExitDataError, s.message());
  }
  out << "report OK: every aggregate is recomputable from its parts\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{
      "Membership-inference audits with ensembles of small "
      "specialized attack models"};
  app.name("mia_audit");
  app.require_subcommand(0, 1);
  std::string verify_path;
  app.add_option("--verify-report", verify_path,
                 "Check that a report's aggregates follow from its parts");

  AuditFlags audit_flags;
  CLI::App* audit = app.add_subcommand(
      "audit", "Run the single-model and many-model experiments");
  audit->add_option("--members", audit_flags.members_path,
                    "Records of training-set members");
  audit->add_option("--nonmembers", audit_flags.nonmembers_path,
                    "Records of non-members");
  audit->add_option("--records", audit_flags.records_path,
                    "Single record file with per-record member flags");
  audit
      ->add_option("--subset-size", audit_flags.subset_size,
                   "Records per side in each specialized subset")
      ->capture_default_str();
  audit->add_option("--runs", audit_flags.runs, "Half-splits per pair")
      ->capture_default_str();
  audit
      ->add_option("--instances", audit_flags.instances,
                   "Independent resamples of the pools")
      ->capture_default_str();
  audit
      ->add_option("--sample-size", audit_flags.sample_size,
                   "Records sampled per side per instance")
      ->capture_default_str();
  audit
      ->add_option("--features", audit_flags.features,
                   "Comma-separated attack features")
      ->capture_default_str();
  audit
      ->add_option("--scalers", audit_flags.scalers,
                   "Scaler grid: robust|minmax|standard|identity")
      ->capture_default_str();
  audit
      ->add_option("--classifiers", audit_flags.classifiers,
                   "Classifier grid: tree|forest|knn|logistic")
      ->capture_default_str();
  audit
      ->add_option("--aggregation", audit_flags.aggregation,
                   "Across instances: average|best")
      ->capture_default_str();
  audit->add_flag("--per-class", audit_flags.per_class,
                  "Also run S-CL<k>/M-CL<k> for every class label k");
  audit
      ->add_option("--experiments", audit_flags.experiments,
                   "Comma-separated experiments, e.g. S-CL01,M-CL0")
      ->capture_default_str();
  audit->add_option("--seed", audit_flags.seed, "Master seed")
      ->capture_default_str();
  audit
      ->add_option("--parallelism", audit_flags.parallelism,
                   "Worker threads (0 = all cores)")
      ->capture_default_str();
  audit->add_option("--output", audit_flags.output, "Report path")
      ->capture_default_str();
  audit->add_option("--save-models", audit_flags.save_models,
                    "Write the winning attack models to this file");
  audit->add_option("--config", audit_flags.config_path,
                    "JSON file of option values; command-line flags win");

  SynthFlags synth_flags;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate synthetic member/non-member files");
  synth->add_option("--classes", synth_flags.classes)->capture_default_str();
  synth->add_option("--members", synth_flags.members)->capture_default_str();
  synth->add_option("--nonmembers", synth_flags.nonmembers)
      ->capture_default_str();
  synth->add_option("--member-confidence", synth_flags.member_confidence)
      ->capture_default_str();
  synth->add_option("--nonmember-confidence", synth_flags.nonmember_confidence)
      ->capture_default_str();
  synth->add_flag("--null", synth_flags.null,
                  "Use the member confidence for non-members too");
  synth->add_option("--label-distribution", synth_flags.label_distribution,
                    "Comma-separated class probabilities (default uniform)");
  synth->add_option("--seed", synth_flags.seed)->capture_default_str();
  synth->add_option("--out-members", synth_flags.out_members)
      ->capture_default_str();
  synth->add_option("--out-nonmembers", synth_flags.out_nonmembers)
      ->capture_default_str();

  InferFlags infer_flags;
  CLI::App* infer = app.add_subcommand(
      "infer", "Majority-vote membership of unknown records");
  infer
      ->add_option("--models", infer_flags.models_path,
                   "Ensemble written by audit --save-models")
      ->required();
  infer->add_option("--unknown", infer_flags.unknown_path, "Records to judge")
      ->required();
  infer->add_option("--experiment", infer_flags.experiment,
                    "Experiment whose models vote (default M-CL01)");
  infer->add_option("--output", infer_flags.output,
                    "Verdict file (default standard output)");

  try {
    app.parse(argc, argv);
    if (!audit_flags.config_path.empty()) {
      if (absl::Status s = ApplyConfigFile(audit_flags.config_path, *audit);
          !s.ok()) {
        return Fail(err, kExitConfigError, s.message());
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (!verify_path.empty()) return RunVerify(verify_path, out, err);
  if (audit->parsed()) return RunAudit(audit_flags, out, err);
  if (synth->parsed()) return RunSynth(synth_flags, out, err);
  if (infer->parsed()) return RunInfer(infer_flags, out, err);
  out << app.help();
  return kExitConfigError;
}

}  // namespace mia
