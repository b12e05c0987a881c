// Copyright 2026 The gradrecon Authors
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

#ifndef GRADRECON_RNG_H_
#define GRADRECON_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gradrecon {

// Sub-stream identifiers. Every random quantity in an experiment is drawn
// from a stream keyed by (root seed, trial, domain), so adding a new kind of
// draw never perturbs existing ones.
enum class StreamDomain : std::uint64_t {
  kUtility = 1,
  kInitialPoint = 2,
  kStepSize = 3,
  kConstraints = 4,
  kBarrierWeight = 5,
  kPolicyValues = 6,
};

std::uint64_t SplitMix64(std::uint64_t x);

// Order-sensitive hash of a word sequence built from SplitMix64 rounds.
std::uint64_t HashWords(std::initializer_list<std::uint64_t> words);

// Sequential generator. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the real-valued transforms are implemented here
// rather than through <random> distributions, which are not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng(std::uint64_t root_seed, std::uint64_t trial, StreamDomain domain)
      : Rng(HashWords({root_seed, trial, static_cast<std::uint64_t>(domain)})) {}

  std::uint64_t NextWord() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform();

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform on {0, ..., count - 1}.
  std::uint64_t Index(std::uint64_t count);

  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Counter-based stream: the draw for (k, i) is a pure function of
// (root seed, trial, domain, k, i). Used for step-size draws so replaying
// iteration k never depends on how many draws happened before it.
class CounterStream {
 public:
  CounterStream(std::uint64_t root_seed, std::uint64_t trial,
                StreamDomain domain = StreamDomain::kStepSize)
      : key_(HashWords(
            {root_seed, trial, static_cast<std::uint64_t>(domain)})) {}

  std::uint64_t Word(std::uint64_t k, std::uint64_t i) const {
    return HashWords({key_, k, i});
  }

  // Uniform on [0, 1).
  double Uniform(std::uint64_t k, std::uint64_t i) const;

  // Uniform on {0, ..., count - 1}.
  std::uint64_t Index(std::uint64_t k, std::uint64_t i,
                      std::uint64_t count) const;

 private:
  std::uint64_t key_;
};

}  // namespace gradrecon

#endif  // GRADRECON_RNG_H_
