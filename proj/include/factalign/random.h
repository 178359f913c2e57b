// Copyright 2026 The factalign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FACTALIGN_RANDOM_H_
#define FACTALIGN_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace factalign {

// The standard distributions are implementation-defined, so sampling is done
// directly on the engine output to stay reproducible across toolchains.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
uint64_t MixSeed(uint64_t value);

// Derives an independent stream seed from a base seed and a key.
uint64_t DeriveSeed(uint64_t seed, std::string_view key);

// Uniform integer in [0, n) by rejection sampling. n must be positive.
uint64_t UniformIndex(Rng &rng, uint64_t n);

// Fisher-Yates shuffle driven by UniformIndex.
template <typename T>
void Shuffle(std::vector<T> &items, Rng &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace factalign

#endif  // FACTALIGN_RANDOM_H_
