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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ipmix/fractal.hpp"
#include "ipmix/image.hpp"
#include "ipmix/image_ops.hpp"
#include "ipmix/mixer.hpp"
#include "ipmix/rng.hpp"
#include "json.hpp"

namespace ipmix {

enum class Framework {
  kChainMixed,  // k chains, each picks image-level or P-level at random
  kLinearMix,   // ceil(k/2) P-level chains, the rest image-level
  kMixedInput,  // one sequential chain; every stage picks its method
};

enum class Method { kImageLevel, kPLevel };

std::string_view to_string(Framework f);
Framework framework_from_string(std::string_view name);
std::string_view to_string(Method m);

struct AugmentConfig {
  int k = 3;
  int t = 3;
  double alpha = 1.0;
  Framework framework = Framework::kChainMixed;
  std::vector<int> patch_sizes{4, 8, 16, 32};
  bool scar_enabled = true;
  std::vector<MixKind> mix_ops = default_mix_kinds();
  std::vector<ImageOp> op_bank = all_image_ops();
  // Probability that a P-level step mixes with a mixing-set image rather than
  // an op-transformed copy of the input.
  double fractal_prob = 0.5;
  // Replaces every random method choice (the draw is still consumed).
  std::optional<Method> force_method;

  // Throws ConfigError on k < 1, t < 1, alpha <= 0, empty op sets, an empty
  // or non-positive patch size set, or fractal_prob outside [0, 1].
  void validate() const;
};

// One P-level step: mix `region` of the chain image with a partner, which is
// mixing-set entry `fractal_index` or `partner_op` applied to the input.
struct MixStep {
  MixRegion region;
  MixKind op = MixKind::kConvex;
  bool scar = false;
  std::optional<std::size_t> fractal_index;
  std::optional<OpDraw> partner_op;
  std::uint64_t mask_seed = 0;  // seeds the random-mask operators
};

using TraceStep = std::variant<OpDraw, MixStep>;

struct ChainTrace {
  // Unset for the sequential framework, where each stage picks its own.
  std::optional<Method> method;
  std::vector<TraceStep> steps;
};

// Every random choice behind one augmentation. Executing a trace is
// deterministic, so a trace reproduces its output exactly.
struct AugmentTrace {
  Framework framework = Framework::kChainMixed;
  std::vector<double> w;
  double m = 0.0;
  std::vector<ChainTrace> chains;
};

nlohmann::json to_json(const AugmentTrace& trace);
AugmentTrace trace_from_json(const nlohmann::json& j);
std::string trace_hash(const AugmentTrace& trace);

struct AugmentResult {
  ImageBuffer image;
  AugmentTrace trace;
};

/**
 * Augmentation engine: a validated config plus a mixing set. Immutable and
 * safe to share between threads; each call is a pure function of its input
 * image and rng stream. Labels never enter or leave.
 */
class Augmenter {
 public:
  Augmenter(std::shared_ptr<const MixingSet> set, AugmentConfig cfg);

  const AugmentConfig& config() const noexcept { return cfg_; }
  const MixingSet& mixing_set() const noexcept { return *set_; }

  // Draws a trace for an image of size `dims` according to cfg.framework.
  AugmentTrace plan(Dims dims, SeededRng& rng) const;
  AugmentTrace plan(Dims dims, Framework framework, SeededRng& rng) const;

  ImageBuffer execute(const ImageBuffer& x, const AugmentTrace& trace) const;

  AugmentResult augment(const ImageBuffer& x, SeededRng& rng) const;
  AugmentResult augment(const ImageBuffer& x, Framework framework, SeededRng& rng) const;

  // Item i uses SeededRng::child(run_seed, i). Output order matches input
  // order and does not depend on `workers`.
  std::vector<ImageBuffer> augment_batch(std::span<const ImageBuffer> xs,
                                         std::uint64_t run_seed, int workers,
                                         std::vector<AugmentTrace>* traces = nullptr) const;

 private:
  const ImageBuffer& partner_image(std::size_t index, Dims dims) const;
  MixStep plan_mix_step(Dims dims, SeededRng& rng) const;
  TraceStep plan_step(Method method, Dims dims, SeededRng& rng) const;
  Method draw_method(SeededRng& rng) const;

  std::shared_ptr<const MixingSet> set_;
  AugmentConfig cfg_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const MixingSet>> resized_;
};

// Free-function forms. `set` must outlive the call.
AugmentResult ipmix_augment(const ImageBuffer& x, const MixingSet& set,
                            const AugmentConfig& cfg, SeededRng& rng);
AugmentResult linear_mix_augment(const ImageBuffer& x, const MixingSet& set,
                                 const AugmentConfig& cfg, SeededRng& rng);
AugmentResult mixed_input_augment(const ImageBuffer& x, const MixingSet& set,
                                  const AugmentConfig& cfg, SeededRng& rng);
std::vector<ImageBuffer> augment_batch(std::span<const ImageBuffer> xs, const MixingSet& set,
                                       const AugmentConfig& cfg, std::uint64_t run_seed,
                                       int workers = 1);

}  // namespace ipmix
