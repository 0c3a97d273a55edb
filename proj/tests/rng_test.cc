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

#include "mia/rng.h"

#include <set>

#include "gtest/gtest.h"

namespace mia {
namespace {

TEST(SplitMix64Test, KnownValues) {
  // First outputs of the reference generator seeded with 0.
  EXPECT_EQ(SplitMix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(SplitMix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(DeriveSeedTest, PathsAreDistinctAndStable) {
  std::set<uint64_t> seen;
  for (uint64_t a = 0; a < 20; ++a) {
    for (uint64_t b = 0; b < 20; ++b) {
      EXPECT_TRUE(seen.insert(DeriveSeed(1, {a, b})).second);
    }
  }
  EXPECT_EQ(DeriveSeed(9, {1, 2, 3}), DeriveSeed(9, {1, 2, 3}));
  EXPECT_NE(DeriveSeed(9, {1, 2, 3}), DeriveSeed(9, {1, 3, 2}));
  EXPECT_NE(DeriveSeed(9, {1, 2}), DeriveSeed(9, {1, 2, 0}));
  EXPECT_NE(DeriveSeed(9, {1}), DeriveSeed(10, {1}));
}

TEST(MakeStreamTest, SameSeedSameSequence) {
  RandomStream a = MakeStream(3, {Tag(StreamTag::kFit), 4});
  RandomStream b = MakeStream(3, {Tag(StreamTag::kFit), 4});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

}  // namespace
}  // namespace mia
