// Copyright 2026 The IPMix Authors. All Rights Reserved.
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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ipmix/errors.hpp"

namespace ipmix {

/**
 * Seedable random stream. The generator is xoshiro256** (Blackman & Vigna)
 * with its 256-bit state expanded from the seed by SplitMix64, so a given seed
 * produces the same sequence on every platform. All distribution sampling is
 * implemented here on top of the raw 64-bit draws; nothing routes through the
 * implementation-defined <random> distributions.
 *
 * A stream has a single owner. Parallel work takes a child stream keyed by
 * (run seed, work-item index) instead of sharing one.
 */
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0);

  // Independent stream for work item `index` of a run seeded with `seed`.
  static SeededRng child(std::uint64_t seed, std::uint64_t index);

  // Sub-stream seeded from exactly one draw of this stream.
  SeededRng fork();

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on the open interval (0, 1); safe to take the log of.
  double uniform_open();
  double uniform(double lo, double hi);
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform on {lo, ..., hi}, inclusive.
  int uniform_int(int lo, int hi);
  bool bernoulli(double p);

  double normal();
  // log of a Gamma(shape, 1) variate. Working in log space keeps tiny shapes
  // from underflowing to zero.
  double log_gamma_variate(double shape);

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

// Chain mixing weights; each entry in (0,1), sum 1.
struct ChainWeights {
  std::vector<double> w;
};

// Skip-connection weight m in [0,1].
struct SkipWeight {
  double m = 0.0;
};

// Symmetric Dirichlet(alpha, ..., alpha) over k components via normalized
// Gamma draws. Always consumes exactly one value from `rng`.
ChainWeights sample_dirichlet(double alpha, std::size_t k, SeededRng& rng);

// Beta(alpha, alpha) via two Gamma draws. Always consumes exactly one value.
SkipWeight sample_beta(double alpha, SeededRng& rng);

template <typename T>
const T& choose_uniform(std::span<const T> items, SeededRng& rng) {
  if (items.empty()) throw ParameterError("choose_uniform: empty list");
  return items[rng.uniform_index(items.size())];
}

template <typename T>
const T& choose_uniform(const std::vector<T>& items, SeededRng& rng) {
  return choose_uniform(std::span<const T>(items), rng);
}

}  // namespace ipmix
