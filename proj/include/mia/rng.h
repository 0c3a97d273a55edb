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

#ifndef MIA_RNG_H_
#define MIA_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace mia {

// Every random decision in the toolkit draws from a stream whose seed is a
// pure function of the master seed and the coordinates of the work unit
// (instance, pair, run, grid cell, ...). Streams are never shared between
// units, so results do not depend on scheduling.
using RandomStream = std::mt19937_64;

// Domain-separation tags for DeriveSeed paths.
enum class StreamTag : uint64_t {
  kInstanceSample = 1,
  kPartition = 2,
  kSplit = 3,
  kFit = 4,
  kSynthetic = 5,
  kNullOracle = 6,
};

uint64_t SplitMix64(uint64_t x);

// Hashes (master, path...) into a 64-bit seed. Distinct paths give
// statistically independent seeds.
uint64_t DeriveSeed(uint64_t master, std::span<const uint64_t> path);
inline uint64_t DeriveSeed(uint64_t master,
                           std::initializer_list<uint64_t> path) {
  return DeriveSeed(master,
                    std::span<const uint64_t>(path.begin(), path.size()));
}

inline RandomStream MakeStream(uint64_t master,
                               std::initializer_list<uint64_t> path) {
  return RandomStream(DeriveSeed(master, path));
}

inline uint64_t Tag(StreamTag tag) { return static_cast<uint64_t>(tag); }

}  // namespace mia

#endif  // MIA_RNG_H_
