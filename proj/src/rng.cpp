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

#include "ipmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ipmix {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

__extension__ typedef unsigned __int128 Uint128;

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) {
    sm += kGolden;
    word = mix64(sm);
  }
}

SeededRng SeededRng::child(std::uint64_t seed, std::uint64_t index) {
  return SeededRng(mix64(mix64(seed) + (index + 1) * kGolden));
}

SeededRng SeededRng::fork() { return SeededRng(next_u64()); }

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  if (n == 0) throw ParameterError("uniform_index: n must be positive");
  // Lemire's multiply-shift with rejection; unbiased.
  Uint128 m = static_cast<Uint128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<Uint128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

int SeededRng::uniform_int(int lo, int hi) {
  if (hi < lo) throw ParameterError("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  return lo + static_cast<int>(uniform_index(span));
}

bool SeededRng::bernoulli(double p) { return uniform() < p; }

double SeededRng::normal() {
  // Box-Muller, one variate per call so consumption is fixed at two draws.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SeededRng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) throw ParameterError("gamma shape must be positive");
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    return log_gamma_variate(shape + 1.0) + std::log(uniform_open()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

ChainWeights sample_dirichlet(double alpha, std::size_t k, SeededRng& rng) {
  if (!(alpha > 0.0)) throw ParameterError("sample_dirichlet: alpha must be positive");
  if (k == 0) throw ParameterError("sample_dirichlet: k must be at least 1");
  SeededRng local = rng.fork();
  ChainWeights out;
  if (k == 1) {
    out.w = {1.0};
    return out;
  }
  std::vector<double> logs(k);
  for (auto& l : logs) l = local.log_gamma_variate(alpha);
  const double top = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  out.w.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.w[i] = std::exp(logs[i] - top);
    total += out.w[i];
  }
  for (auto& w : out.w) w /= total;
  return out;
}

SkipWeight sample_beta(double alpha, SeededRng& rng) {
  if (!(alpha > 0.0)) throw ParameterError("sample_beta: alpha must be positive");
  SeededRng local = rng.fork();
  const double lx = local.log_gamma_variate(alpha);
  const double ly = local.log_gamma_variate(alpha);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  const double m = 1.0 / (1.0 + std::exp(ly - lx));
  return SkipWeight{std::clamp(m, 0.0, 1.0)};
}

}  // namespace ipmix
