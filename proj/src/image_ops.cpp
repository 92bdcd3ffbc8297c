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

#include "ipmix/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ipmix/codec.hpp"
#include "ipmix/errors.hpp"

namespace ipmix {
namespace {

constexpr double kThird = 1.0 / 3.0;

// Ranges follow the AugMix conventions.
constexpr std::array<ImageOpInfo, kImageOpCount> kBank{{
    {ImageOp::kAutocontrast, "autocontrast", 0.0, 0.0, 0.0, 0.0, std::nullopt},
    {ImageOp::kEqualize, "equalize", 0.0, 0.0, 0.0, 0.0, std::nullopt},
    {ImageOp::kPosterize, "posterize", 1.0, 4.0, 1.0, 8.0, 8.0},
    {ImageOp::kSolarize, "solarize", 0.0, 1.0, 0.0, 1.0, 1.0},
    {ImageOp::kRotate, "rotate", -30.0, 30.0, -360.0, 360.0, 0.0},
    {ImageOp::kShearX, "shear_x", -0.3, 0.3, -1.0, 1.0, 0.0},
    {ImageOp::kShearY, "shear_y", -0.3, 0.3, -1.0, 1.0, 0.0},
    {ImageOp::kTranslateX, "translate_x", -kThird, kThird, -1.0, 1.0, 0.0},
    {ImageOp::kTranslateY, "translate_y", -kThird, kThird, -1.0, 1.0, 0.0},
    {ImageOp::kBrightness, "brightness", 0.1, 1.9, 0.0, 2.0, 1.0},
    {ImageOp::kSharpness, "sharpness", 0.1, 1.9, 0.0, 2.0, 1.0},
    {ImageOp::kInvert, "invert", 0.0, 0.0, 0.0, 0.0, std::nullopt},
    {ImageOp::kMirror, "mirror", 0.0, 0.0, 0.0, 0.0, std::nullopt},
}};

double clamp01(double v) { return v > 0.0 ? (v < 1.0 ? v : 1.0) : 0.0; }

template <typename F>
ImageBuffer map_samples(const ImageBuffer& img, F&& f) {
  ImageBuffer out = img;
  for (double& v : out.mutable_data()) v = clamp01(f(v));
  return out;
}

// Zero outside the image.
double sample_bilinear(const ImageBuffer& img, double sx, double sy, int c) {
  const double fx = std::floor(sx);
  const double fy = std::floor(sy);
  const double tx = sx - fx;
  const double ty = sy - fy;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  auto fetch = [&](int y, int x) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return 0.0;
    return img.at(y, x, c);
  };
  const double top = fetch(y0, x0) * (1.0 - tx) + fetch(y0, x0 + 1) * tx;
  const double bot = fetch(y0 + 1, x0) * (1.0 - tx) + fetch(y0 + 1, x0 + 1) * tx;
  return top * (1.0 - ty) + bot * ty;
}

// out(x, y) = img(sx, sy) with (sx, sy) = inverse(x, y).
template <typename Inverse>
ImageBuffer warp(const ImageBuffer& img, Inverse&& inverse) {
  ImageBuffer out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto [sx, sy] = inverse(static_cast<double>(x), static_cast<double>(y));
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        out.at(y, x, c) = clamp01(sample_bilinear(img, sx, sy, c));
      }
    }
  }
  return out;
}

ImageBuffer autocontrast(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (int c = 0; c < ImageBuffer::kChannels; ++c) {
    double lo = 1.0;
    double hi = 0.0;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        lo = std::min(lo, img.at(y, x, c));
        hi = std::max(hi, img.at(y, x, c));
      }
    }
    if (!(hi > lo)) continue;
    const double scale = 1.0 / (hi - lo);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        out.at(y, x, c) = clamp01((img.at(y, x, c) - lo) * scale);
      }
    }
  }
  return out;
}

// Per-channel histogram equalization on the 8-bit projection, using the same
// lookup construction as PIL's ImageOps.equalize.
ImageBuffer equalize(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (int c = 0; c < ImageBuffer::kChannels; ++c) {
    std::array<long, 256> hist{};
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) ++hist[quantize(img.at(y, x, c))];
    }
    long total = 0;
    long last = 0;
    for (long h : hist) {
      total += h;
      if (h != 0) last = h;
    }
    const long step = (total - last) / 255;
    if (step == 0) continue;
    std::array<double, 256> lut{};
    long n = step / 2;
    for (int i = 0; i < 256; ++i) {
      lut[i] = static_cast<double>(std::min(255L, n / step)) / 255.0;
      n += hist[i];
    }
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        out.at(y, x, c) = lut[quantize(img.at(y, x, c))];
      }
    }
  }
  return out;
}

ImageBuffer posterize(const ImageBuffer& img, double strength) {
  const int bits = std::clamp(static_cast<int>(std::lround(strength)), 1, 8);
  // Keeping all 8 bits is the identity; the real-valued samples stay as is.
  if (bits == 8) return img;
  const int shift = 8 - bits;
  const double levels = static_cast<double>((1 << bits) - 1);
  return map_samples(img, [&](double v) { return (quantize(v) >> shift) / levels; });
}

ImageBuffer sharpness(const ImageBuffer& img, double factor) {
  // 3x3 smoothing kernel [[1,1,1],[1,5,1],[1,1,1]] / 13; border pixels keep
  // their original value in the degenerate image.
  ImageBuffer smooth = img;
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) {
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        double acc = 4.0 * img.at(y, x, c);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) acc += img.at(y + dy, x + dx, c);
        }
        smooth.at(y, x, c) = acc / 13.0;
      }
    }
  }
  ImageBuffer out = img;
  auto dst = out.mutable_data();
  const auto src = img.data();
  const auto blur = smooth.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = clamp01((1.0 - factor) * blur[i] + factor * src[i]);
  }
  return out;
}

}  // namespace

std::span<const ImageOpInfo> op_bank_info() { return kBank; }

const ImageOpInfo& op_info(ImageOp op) { return kBank[static_cast<std::size_t>(op)]; }

std::vector<ImageOp> all_image_ops() {
  std::vector<ImageOp> ops;
  for (const auto& info : kBank) ops.push_back(info.op);
  return ops;
}

std::string_view to_string(ImageOp op) { return op_info(op).name; }

ImageOp image_op_from_string(std::string_view name) {
  for (const auto& info : kBank) {
    if (info.name == name) return info.op;
  }
  throw ParameterError("unknown image op: " + std::string(name));
}

ImageBuffer apply_op(const ImageBuffer& img, const OpDraw& draw) {
  const auto& info = op_info(draw.op);
  const double s = draw.strength;
  if (!(s >= info.domain_lo && s <= info.domain_hi)) {
    throw ParameterError("strength " + std::to_string(s) + " outside domain of " +
                         std::string(info.name));
  }
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  switch (draw.op) {
    case ImageOp::kAutocontrast:
      return autocontrast(img);
    case ImageOp::kEqualize:
      return equalize(img);
    case ImageOp::kPosterize:
      return posterize(img, s);
    case ImageOp::kSolarize:
      return map_samples(img, [s](double v) { return v > s ? 1.0 - v : v; });
    case ImageOp::kRotate: {
      const double rad = s * std::numbers::pi / 180.0;
      const double cs = std::cos(rad);
      const double sn = std::sin(rad);
      // Image y grows downward, so a counter-clockwise turn on screen maps the
      // output offset (dx, dy) back through the transposed rotation.
      return warp(img, [&](double x, double y) {
        const double dx = x - cx;
        const double dy = y - cy;
        return std::pair{cs * dx - sn * dy + cx, sn * dx + cs * dy + cy};
      });
    }
    case ImageOp::kShearX:
      return warp(img, [&](double x, double y) { return std::pair{x + s * (y - cy), y}; });
    case ImageOp::kShearY:
      return warp(img, [&](double x, double y) { return std::pair{x, y + s * (x - cx)}; });
    case ImageOp::kTranslateX: {
      const double shift = s * img.width();
      return warp(img, [&](double x, double y) { return std::pair{x - shift, y}; });
    }
    case ImageOp::kTranslateY: {
      const double shift = s * img.height();
      return warp(img, [&](double x, double y) { return std::pair{x, y - shift}; });
    }
    case ImageOp::kBrightness:
      return map_samples(img, [s](double v) { return v * s; });
    case ImageOp::kSharpness:
      return sharpness(img, s);
    case ImageOp::kInvert:
      return map_samples(img, [](double v) { return 1.0 - v; });
    case ImageOp::kMirror: {
      ImageBuffer out(img.height(), img.width());
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          for (int c = 0; c < ImageBuffer::kChannels; ++c) {
            out.at(y, x, c) = img.at(y, img.width() - 1 - x, c);
          }
        }
      }
      return out;
    }
  }
  throw ParameterError("unknown image op");
}

OpDraw sample_op(SeededRng& rng, std::span<const ImageOp> bank) {
  if (bank.empty()) throw ParameterError("sample_op: empty op bank");
  const ImageOp op = bank[rng.uniform_index(bank.size())];
  const auto& info = op_info(op);
  return {op, rng.uniform(info.lo, info.hi)};
}

OpDraw sample_op(SeededRng& rng) {
  static const std::vector<ImageOp> kAll = all_image_ops();
  return sample_op(rng, kAll);
}

}  // namespace ipmix
