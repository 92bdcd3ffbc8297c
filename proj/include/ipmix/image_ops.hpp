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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipmix/image.hpp"
#include "ipmix/rng.hpp"

namespace ipmix {

// Whole-image, label-preserving transforms. None of them is an ImageNet-C
// corruption (no noise, blur, weather or compression).
enum class ImageOp {
  kAutocontrast,
  kEqualize,
  kPosterize,
  kSolarize,
  kRotate,
  kShearX,
  kShearY,
  kTranslateX,
  kTranslateY,
  kBrightness,
  kSharpness,
  kInvert,
  kMirror,
};

inline constexpr std::size_t kImageOpCount = 13;

struct ImageOpInfo {
  ImageOp op;
  std::string_view name;
  // Strengths drawn by sample_op.
  double lo;
  double hi;
  // Strengths accepted by apply_op.
  double domain_lo;
  double domain_hi;
  // Strength at which the op is the identity, for parameterized ops.
  std::optional<double> identity;
};

/**
 * Strength semantics:
 *   posterize    bits kept, rounded to the nearest integer (1..8)
 *   solarize     threshold; samples strictly above it are inverted
 *   rotate       degrees, counter-clockwise about the image center
 *   shear_x/y    shear factor about the center line
 *   translate    fraction of the image side
 *   brightness   multiplicative factor toward black (1 = identity)
 *   sharpness    blend factor against a 3x3 smoothed copy (1 = identity)
 * autocontrast, equalize, invert and mirror ignore the strength.
 *
 * Geometric ops resample bilinearly and fill vacated pixels with 0.
 */
const ImageOpInfo& op_info(ImageOp op);
std::span<const ImageOpInfo> op_bank_info();
std::vector<ImageOp> all_image_ops();

std::string_view to_string(ImageOp op);
// Throws ParameterError for unknown names.
ImageOp image_op_from_string(std::string_view name);

struct OpDraw {
  ImageOp op = ImageOp::kInvert;
  double strength = 0.0;

  bool operator==(const OpDraw&) const = default;
};

// Throws ParameterError when the strength lies outside the op's domain.
ImageBuffer apply_op(const ImageBuffer& img, const OpDraw& draw);

// Op uniform over `bank`, strength uniform over that op's sampling range.
OpDraw sample_op(SeededRng& rng, std::span<const ImageOp> bank);
OpDraw sample_op(SeededRng& rng);

}  // namespace ipmix
