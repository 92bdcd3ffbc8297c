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
#include <span>
#include <string_view>
#include <vector>

#include "ipmix/image.hpp"
#include "ipmix/rng.hpp"

namespace ipmix {

// Rectangle [x0, x0 + w) x [y0, y0 + h) plus the mixing intensity lambda.
// The mask it encodes is lambda inside the rectangle and 1 outside; a
// rectangle covering the whole image is pixel-level mixing.
struct MixRegion {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
  double lambda = 1.0;

  bool covers(Dims dims) const noexcept {
    return x0 == 0 && y0 == 0 && w == dims.width && h == dims.height;
  }
  bool operator==(const MixRegion&) const = default;
};

// Throws ParameterError when the region is empty, leaves the image, or
// lambda is outside [0, 1].
void validate(const MixRegion& region, Dims dims);

enum class MixKind {
  kAddition,        // clamp(x1 + (1 - lambda) x2)
  kMultiplication,  // x1^lambda * x2^(1 - lambda), inputs floored at 1e-4
  kRandomPixel,     // H x W x 1 Bernoulli(lambda) mask, shared by channels
  kRandomElement,   // H x W x 3 Bernoulli(lambda) mask, channels independent
  kConvex,          // lambda x1 + (1 - lambda) x2, the plain blend
};

std::string_view to_string(MixKind kind);
MixKind mix_kind_from_string(std::string_view name);
// The four operators mixed by default (convex is opt-in).
std::vector<MixKind> default_mix_kinds();

inline constexpr double kMultiplicationFloor = 1e-4;

/**
 * Side uniform from `size_set`, position uniform over valid offsets, lambda
 * from Beta(alpha, alpha). A side at least min(H, W) yields the whole-image
 * region.
 */
MixRegion sample_square_region(Dims dims, std::span<const int> size_set, double alpha,
                               SeededRng& rng);

/**
 * Long thin rectangle. With m = min(H, W): long side uniform on the integers
 * [max(4, floor(0.3 m)), floor(0.8 m)], short side uniform on
 * [2, min(max(3, floor(0.1 m)), floor(long / 2))], horizontal or vertical
 * with equal probability. Requires m >= 8.
 */
MixRegion sample_scar_region(Dims dims, double alpha, SeededRng& rng);

// Bernoulli(p) mask over the region; 1 selects x1.
MaskBuffer random_region_mask(int height, int width, int channels, double p,
                              SeededRng& rng);

/**
 * Mixes x2 into x1 inside `region` with operator `kind`; outside the region
 * the output is x1 bit for bit. `rng` is only read by the random-mask
 * operators.
 */
ImageBuffer mix_in_region(const ImageBuffer& x1, const ImageBuffer& x2,
                          const MixRegion& region, MixKind kind, SeededRng& rng);

}  // namespace ipmix
