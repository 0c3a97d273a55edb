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

// Reference values for the per-record features, computed independently at
// 40 significant digits and rounded to 20.

#ifndef MIA_TESTS_REFERENCE_VALUES_H_
#define MIA_TESTS_REFERENCE_VALUES_H_

#include <vector>

namespace mia::testing {

struct FeatureReference {
  std::vector<double> probs;
  int label;
  double loss;
  double entropy;
  double modified_entropy;
};

inline const std::vector<FeatureReference>& FeatureReferences() {
  static const auto* kCases = new std::vector<FeatureReference>{
      {{0.9, 0.1},
       0,
       0.10536051565782630123,
       0.32508297339144823951,
       0.021072103131565260246},
      {{0.9, 0.1},
       1,
       2.302585092994045684,
       0.32508297339144823951,
       4.1446531673892822312},
      {{0.5, 0.5},
       0,
       0.69314718055994530942,
       0.69314718055994530942,
       0.69314718055994530942},
      {{0.5, 0.5},
       1,
       0.69314718055994530942,
       0.69314718055994530942,
       0.69314718055994530942},
      {{0.7, 0.2, 0.1},
       0,
       0.35667494393873237891,
       0.80181855254333730856,
       0.16216724501024429495},
      {{0.7, 0.2, 0.1},
       2,
       2.302585092994045684,
       0.80181855254333730856,
       2.9597362569856382616},
      {{0.25, 0.25, 0.25, 0.25},
       3,
       1.3862943611198906188,
       1.3862943611198906188,
       1.2554823251787536597},
      {{0.99, 0.01},
       0,
       0.010050335853501441184,
       0.056001534354847340452,
       0.00020100671707002882367},
      {{0.99, 0.01},
       1,
       4.605170185988091368,
       0.056001534354847340452,
       9.1182369682564209087},
      {{0.6, 0.4},
       1,
       0.91629073187415506518,
       0.673011667009256436,
       1.0995488782489860782},
      {{0.333, 0.333, 0.334},
       1,
       1.0996127890016932249,
       1.098611289000943524,
       1.004054666094822125},
      {{0.05, 0.15, 0.8},
       2,
       0.22314355131420975577,
       0.61286945246194954959,
       0.071571214406885714802},
      {{0.05, 0.15, 0.8},
       0,
       2.9957322735539909934,
       0.61286945246194954959,
       4.1578738292482379804},
      {{0.123, 0.877},
       1,
       0.13124828660995401186,
       0.37285997096092517389,
       0.032287078506048686918},
      {{0.001, 0.999},
       0,
       6.9077552789821370521,
       0.0079072551122320870187,
       13.80169504740630983},
      {{0.4, 0.3, 0.2, 0.1},
       1,
       1.2039728043259359926,
       1.2798542258336674672,
       1.1022759743631760494},
      {{0.45, 0.55},
       0,
       0.79850769621777161064,
       0.68813881371358847195,
       0.87835846583954877171},
      {{0.2, 0.2, 0.2, 0.2, 0.2},
       4,
       1.6094379124341003746,
       1.6094379124341003746,
       1.4660651709986481043},
      {{0.95, 0.03, 0.02},
       1,
       3.5065578973199816766,
       0.23216582669633537823,
       6.2477108744230240591},
      {{0.3, 0.7},
       1,
       0.35667494393873237891,
       0.61086430205489346303,
       0.21400496636323942735},
      {{0.51, 0.49},
       0,
       0.67334455326376559639,
       0.69294716722447818549,
       0.65987766219849028446},
      {{0.1, 0.6, 0.3},
       1,
       0.51082562376599068321,
       0.89794572485677977611,
       0.32186878425379861708},
  };
  return *kCases;
}

}  // namespace mia::testing

#endif  // MIA_TESTS_REFERENCE_VALUES_H_
