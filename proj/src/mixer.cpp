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

#include "ipmix/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipmix/errors.hpp"

namespace ipmix {

void validate(const MixRegion& r, Dims dims) {
  if (r.w < 1 || r.h < 1 || r.x0 < 0 || r.y0 < 0 || r.x0 + r.w > dims.width ||
      r.y0 + r.h > dims.height) {
    throw ParameterError("mix region outside image bounds");
  }
  if (!(r.lambda >= 0.0 && r.lambda <= 1.0)) throw ParameterError("lambda outside [0,1]");
}

std::string_view to_string(MixKind kind) {
  switch (kind) {
    case MixKind::kAddition:
      return "addition";
    case MixKind::kMultiplication:
      return "multiplication";
    case MixKind::kRandomPixel:
      return "random_pixel";
    case MixKind::kRandomElement:
      return "random_element";
    case MixKind::kConvex:
      return "convex";
  }
  return "convex";
}

MixKind mix_kind_from_string(std::string_view name) {
  for (MixKind k : {MixKind::kAddition, MixKind::kMultiplication, MixKind::kRandomPixel,
                    MixKind::kRandomElement, MixKind::kConvex}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown mix operator: " + std::string(name));
}

std::vector<MixKind> default_mix_kinds() {
  return {MixKind::kAddition, MixKind::kMultiplication, MixKind::kRandomPixel,
          MixKind::kRandomElement};
}

MixRegion sample_square_region(Dims dims, std::span<const int> size_set, double alpha,
                               SeededRng& rng) {
  if (size_set.empty()) throw ParameterError("patch size set is empty");
  for (int s : size_set) {
    if (s < 1) throw ParameterError("patch sizes must be positive");
  }
  const int side = size_set[rng.uniform_index(size_set.size())];
  MixRegion region;
  if (side >= std::min(dims.height, dims.width)) {
    region = {0, 0, dims.width, dims.height, 1.0};
  } else {
    region.w = side;
    region.h = side;
    region.x0 = rng.uniform_int(0, dims.width - side);
    region.y0 = rng.uniform_int(0, dims.height - side);
  }
  region.lambda = sample_beta(alpha, rng).m;
  return region;
}

MixRegion sample_scar_region(Dims dims, double alpha, SeededRng& rng) {
  const int m = std::min(dims.height, dims.width);
  if (m < 8) throw ParameterError("scar patches need min(H, W) >= 8");
  const int long_lo = std::max(4, static_cast<int>(std::floor(0.3 * m)));
  const int long_hi = static_cast<int>(std::floor(0.8 * m));
  const int long_side = rng.uniform_int(long_lo, long_hi);
  const int short_hi = std::min(std::max(3, static_cast<int>(std::floor(0.1 * m))), long_side / 2);
  const int short_side = rng.uniform_int(2, short_hi);
  MixRegion region;
  if (rng.bernoulli(0.5)) {
    region.w = long_side;
    region.h = short_side;
  } else {
    region.w = short_side;
    region.h = long_side;
  }
  region.x0 = rng.uniform_int(0, dims.width - region.w);
  region.y0 = rng.uniform_int(0, dims.height - region.h);
  region.lambda = sample_beta(alpha, rng).m;
  return region;
}

MaskBuffer random_region_mask(int height, int width, int channels, double p, SeededRng& rng) {
  MaskBuffer mask(height, width, channels);
  for (double& v : mask.mutable_data()) v = rng.bernoulli(p) ? 1.0 : 0.0;
  return mask;
}

ImageBuffer mix_in_region(const ImageBuffer& x1, const ImageBuffer& x2,
                          const MixRegion& region, MixKind kind, SeededRng& rng) {
  if (x1.dims() != x2.dims()) throw ParameterError("mix_in_region: image size mismatch");
  validate(region, x1.dims());
  const double lambda = region.lambda;
  ImageBuffer out = x1;

  if (kind == MixKind::kRandomPixel || kind == MixKind::kRandomElement) {
    const int channels = kind == MixKind::kRandomPixel ? 1 : ImageBuffer::kChannels;
    const MaskBuffer mask = random_region_mask(region.h, region.w, channels, lambda, rng);
    for (int y = 0; y < region.h; ++y) {
      for (int x = 0; x < region.w; ++x) {
        for (int c = 0; c < ImageBuffer::kChannels; ++c) {
          const int iy = region.y0 + y;
          const int ix = region.x0 + x;
          out.at(iy, ix, c) = mask.weight(y, x, c) == 1.0 ? x1.at(iy, ix, c) : x2.at(iy, ix, c);
        }
      }
    }
    return out;
  }

  for (int y = region.y0; y < region.y0 + region.h; ++y) {
    for (int x = region.x0; x < region.x0 + region.w; ++x) {
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        const double a = x1.at(y, x, c);
        const double b = x2.at(y, x, c);
        double v = a;
        switch (kind) {
          case MixKind::kAddition:
            v = std::min(1.0, a + (1.0 - lambda) * b);
            break;
          case MixKind::kMultiplication:
            v = std::pow(std::max(a, kMultiplicationFloor), lambda) *
                std::pow(std::max(b, kMultiplicationFloor), 1.0 - lambda);
            v = std::clamp(v, 0.0, 1.0);
            break;
          case MixKind::kConvex:
            v = std::clamp(lambda * a + (1.0 - lambda) * b, std::min(a, b), std::max(a, b));
            break;
          default:
            break;
        }
        out.at(y, x, c) = v;
      }
    }
  }
  return out;
}

}  // namespace ipmix
