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

#include "gradrecon/rng.h"

#include <cmath>
#include <numbers>

namespace gradrecon {
namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

double WordToUnit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * kTwoPow53Inv;
}

// Lemire's multiply-shift; the bias for count << 2^64 is far below anything
// the Monte Carlo checks can resolve.
std::uint64_t WordToIndex(std::uint64_t word, std::uint64_t count) {
  __extension__ using Wide = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<Wide>(word) * count) >> 64);
}

}  // namespace

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashWords(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t w : words) h = SplitMix64(h ^ SplitMix64(w));
  return h;
}

double Rng::Uniform() { return WordToUnit(engine_()); }

std::uint64_t Rng::Index(std::uint64_t count) {
  return WordToIndex(engine_(), count);
}

double Rng::Normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Box-Muller; 1 - U lies in (0, 1] so the log is finite.
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

double CounterStream::Uniform(std::uint64_t k, std::uint64_t i) const {
  return WordToUnit(Word(k, i));
}

std::uint64_t CounterStream::Index(std::uint64_t k, std::uint64_t i,
                                   std::uint64_t count) const {
  return WordToIndex(Word(k, i), count);
}

}  // namespace gradrecon
