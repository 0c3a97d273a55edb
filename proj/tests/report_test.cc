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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mia/engine.h"
#include "mia/ensemble_io.h"
#include "mia/json_text.h"
#include "mia/synthetic.h"
#include "test_util.h"

namespace mia {
namespace {

using ::mia::testing::ReadText;
using ::mia::testing::TestDir;
using ::mia::testing::WriteText;
using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::SizeIs;

class ReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SynthSpec spec;
    spec.n_members = 60;
    spec.n_nonmembers = 60;
    spec.seed = 9;
    data_ = *GenerateSyntheticDataset(spec);
    cfg_.subset_size = 10;
    cfg_.runs_per_pair = 2;
    cfg_.n_instances = 2;
    cfg_.instance_sample_per_side = 40;
    cfg_.feature_spec = *FeatureSpec::Parse("loss,class_scaled_probs");
    cfg_.scaler_grid = {{ScalerKind::kRobust, true}};
    cfg_.classifier_grid = {ClassifierKind::kDecisionTree,
                            ClassifierKind::kLogistic};
    cfg_.keep_models = true;
  }

  AuditReport Run() {
    AuditReport report;
    report.config = cfg_;
    for (const char* name : {"M-CL01", "S-CL01"}) {
      report.experiments.push_back(*RunExperiment(
          data_->first, data_->second, cfg_, *ParseExperiment(name)));
    }
    return report;
  }

  std::optional<std::pair<Dataset, Dataset>> data_;
  EngineConfig cfg_;
};

TEST_F(ReportTest, LayoutAndKeyOrder) {
  const Json j = ReportToJson(Run());
  std::vector<std::string> keys;
  for (const auto& [key, unused] : j.items()) keys.push_back(key);
  EXPECT_THAT(keys, ElementsAre("config", "seed", "experiments"));
  std::vector<std::string> experiments;
  for (const auto& [key, unused] : j["experiments"].items()) {
    experiments.push_back(key);
  }
  EXPECT_THAT(experiments, ElementsAre("M-CL01", "S-CL01"));

  const Json& m = j["experiments"]["M-CL01"];
  EXPECT_EQ(m["aggregate"]["mode"], "average");
  ASSERT_THAT(m["instances"], SizeIs(2));
  const Json& best = m["instances"][0]["pairs"][0]["best_run"];
  for (const char* key :
       {"run", "scaler", "classifier", "features", "accuracy", "auc"}) {
    EXPECT_TRUE(best.contains(key)) << key;
  }
  EXPECT_THAT(j["experiments"]["S-CL01"]["instances"][0]["pairs"], SizeIs(1));
  EXPECT_EQ(j["config"]["subset_size"], 10);
  EXPECT_FALSE(j["config"].contains("parallelism"));
}

TEST_F(ReportTest, WrittenReportVerifies) {
  const auto dir = TestDir();
  const std::string path = (dir / "report.json").string();
  ASSERT_TRUE(WriteReport(Run(), path).ok());
  absl::StatusOr<Json> back = ReadReport(path);
  ASSERT_TRUE(back.ok());
  EXPECT_TRUE(VerifyReport(*back).ok()) << VerifyReport(*back);
  EXPECT_EQ(ReadText(path).back(), '\n');
}

TEST_F(ReportTest, VerifyCatchesTampering) {
  Json j = ReportToJson(Run());
  Json tampered = j;
  double& a = tampered["experiments"]["M-CL01"]["instances"][0]["pairs"][0]
                      ["best_run"]["accuracy"]
                          .get_ref<double&>();
  a += 0.01;
  EXPECT_FALSE(VerifyReport(tampered).ok());

  tampered = j;
  tampered["experiments"]["S-CL01"]["aggregate"]["mode"] = "best";
  // Two instances with different scores: max differs from mean.
  EXPECT_FALSE(VerifyReport(tampered).ok());

  EXPECT_FALSE(VerifyReport(Json::array()).ok());
}

TEST_F(ReportTest, RealsSurviveTextRoundTrip) {
  const AuditReport report = Run();
  const std::string text = FormatReport(report);
  const Json parsed = Json::parse(text);
  EXPECT_EQ(
      parsed["experiments"]["M-CL01"]["aggregate"]["accuracy"].get<double>(),
      *report.experiments[0].accuracy);
  EXPECT_EQ(DumpJson(parsed, 2) + "\n", text);
}

TEST(ReportEmptyTest, ZeroInstancesHaveNullAggregate) {
  AuditReport report;
  CampaignResult empty;
  empty.experiment = "M-CL01";
  report.experiments.push_back(empty);
  const Json j = ReportToJson(report);
  EXPECT_TRUE(j["experiments"]["M-CL01"]["aggregate"]["accuracy"].is_null());
  EXPECT_TRUE(VerifyReport(j).ok());
}

TEST(JsonTextTest, SeventeenDigitsAndNonFinite) {
  EXPECT_EQ(FormatReal(0.1), "0.10000000000000001");
  EXPECT_EQ(FormatReal(1.0), "1");
  Json j = Json::array({0.5, std::nan(""), 2});
  EXPECT_EQ(DumpJson(j), "[0.5,null,2]");
}

TEST_F(ReportTest, EnsembleRoundTripScoresIdentically) {
  const AuditReport report = Run();
  SavedEnsemble ensemble;
  ensemble.features = cfg_.feature_spec;
  ensemble.num_classes = 2;
  for (const CampaignResult& c : report.experiments) {
    ensemble.experiments.emplace_back(c.experiment, CollectModels(c));
  }
  ASSERT_THAT(ensemble.experiments[0].second, SizeIs(8));

  const auto dir = TestDir();
  const std::string path = (dir / "ensemble.json").string();
  ASSERT_TRUE(SaveEnsemble(ensemble, path).ok());
  absl::StatusOr<SavedEnsemble> back = LoadEnsemble(path);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->features.Names(), ensemble.features.Names());
  EXPECT_EQ(back->num_classes, 2);
  absl::StatusOr<std::vector<TrainedAttackModel>> models =
      back->Models("M-CL01");
  ASSERT_TRUE(models.ok());
  EXPECT_EQ(*models, ensemble.experiments[0].second);
  EXPECT_FALSE(back->Models("M-CL9").ok());

  auto original = InferMembership(ensemble.experiments[0].second, data_->first,
                                  cfg_.feature_spec);
  auto reloaded = InferMembership(*models, data_->first, back->features);
  ASSERT_TRUE(original.ok());
  ASSERT_TRUE(reloaded.ok());
  for (size_t i = 0; i < original->size(); ++i) {
    EXPECT_EQ((*original)[i].vote_fraction, (*reloaded)[i].vote_fraction);
  }
}

TEST(EnsembleIoTest, RejectsForeignOrBrokenFiles) {
  const auto dir = TestDir();
  WriteText(dir / "a.json", "{\"format\":\"other\",\"version\":1}");
  EXPECT_FALSE(LoadEnsemble((dir / "a.json").string()).ok());
  WriteText(dir / "b.json", "{\"format\":\"mia-ensemble\",\"version\":99}");
  absl::StatusOr<SavedEnsemble> b = LoadEnsemble((dir / "b.json").string());
  ASSERT_FALSE(b.ok());
  EXPECT_THAT(std::string(b.status().message()), HasSubstr("version"));
  WriteText(dir / "c.json", "not json");
  EXPECT_FALSE(LoadEnsemble((dir / "c.json").string()).ok());
  EXPECT_FALSE(LoadEnsemble((dir / "missing.json").string()).ok());
  EXPECT_FALSE(ModelFromJson(Json::object()).ok());
}

}  // namespace
}  // namespace mia
