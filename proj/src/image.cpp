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

#include "ipmix/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipmix/errors.hpp"

namespace ipmix {
namespace {

void check_dims(int height, int width) {
  if (height < 1 || width < 1) {
    throw ParameterError("image dimensions must be positive, got " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
}

void check_unit(std::span<const double> data, const char* what) {
  for (double v : data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParameterError(std::string(what) + ": sample outside [0,1]");
    }
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int height, int width, double fill)
    : height_(height), width_(width) {
  check_dims(height, width);
  if (!(fill >= 0.0 && fill <= 1.0)) throw ParameterError("fill outside [0,1]");
  data_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

ImageBuffer::ImageBuffer(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  check_dims(height, width);
  if (data_.size() != static_cast<std::size_t>(height) * width * kChannels) {
    throw ParameterError("image data length does not match HxWx3");
  }
  check_unit(data_, "ImageBuffer");
}

MaskBuffer::MaskBuffer(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width);
  if (channels != 1 && channels != 3) throw ParameterError("mask channels must be 1 or 3");
  if (!(fill >= 0.0 && fill <= 1.0)) throw ParameterError("mask fill outside [0,1]");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

MaskBuffer::MaskBuffer(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width);
  if (channels != 1 && channels != 3) throw ParameterError("mask channels must be 1 or 3");
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw ParameterError("mask data length does not match HxWxC");
  }
  check_unit(data_, "MaskBuffer");
}

ImageBuffer blend_convex(const ImageBuffer& x1, const ImageBuffer& x2,
                         const MaskBuffer& mask) {
  if (x1.dims() != x2.dims() || mask.height() != x1.height() ||
      mask.width() != x1.width()) {
    throw ParameterError("blend_convex: shape mismatch");
  }
  ImageBuffer out = x1;
  auto dst = out.mutable_data();
  const auto a = x1.data();
  const auto b = x2.data();
  const auto m = mask.data();
  const std::size_t pixels = static_cast<std::size_t>(x1.height()) * x1.width();
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int c = 0; c < ImageBuffer::kChannels; ++c) {
      const std::size_t i = p * ImageBuffer::kChannels + c;
      const double w = mask.channels() == 1 ? m[p] : m[i];
      // The result lies between a[i] and b[i]; clamp only guards rounding.
      const double v = w * a[i] + (1.0 - w) * b[i];
      dst[i] = std::clamp(v, std::min(a[i], b[i]), std::max(a[i], b[i]));
    }
  }
  return out;
}

void clamp_unit(std::span<double> samples) {
  for (double& v : samples) {
    v = v > 0.0 ? (v < 1.0 ? v : 1.0) : 0.0;
  }
}

ImageBuffer resize_bilinear(const ImageBuffer& img, Dims target) {
  check_dims(target.height, target.width);
  if (img.dims() == target) return img;
  ImageBuffer out(target.height, target.width);
  const double sy = static_cast<double>(img.height()) / target.height;
  const double sx = static_cast<double>(img.width()) / target.width;
  for (int y = 0; y < target.height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < target.width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - x0;
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        const double top = img.at(y0, x0, c) * (1 - tx) + img.at(y0, x1, c) * tx;
        const double bot = img.at(y1, x0, c) * (1 - tx) + img.at(y1, x1, c) * tx;
        out.at(y, x, c) = std::clamp(top * (1 - ty) + bot * ty, 0.0, 1.0);
      }
    }
  }
  return out;
}

ImageBuffer center_crop_resize(const ImageBuffer& img, Dims target) {
  check_dims(target.height, target.width);
  // Largest window of the target aspect ratio inside the source.
  const double want = static_cast<double>(target.width) / target.height;
  int crop_w = img.width();
  int crop_h = img.height();
  if (static_cast<double>(img.width()) / img.height() > want) {
    crop_w = std::max(1, static_cast<int>(std::lround(img.height() * want)));
  } else {
    crop_h = std::max(1, static_cast<int>(std::lround(img.width() / want)));
  }
  const int oy = (img.height() - crop_h) / 2;
  const int ox = (img.width() - crop_w) / 2;
  ImageBuffer crop(crop_h, crop_w);
  for (int y = 0; y < crop_h; ++y) {
    for (int x = 0; x < crop_w; ++x) {
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        crop.at(y, x, c) = img.at(y + oy, x + ox, c);
      }
    }
  }
  return resize_bilinear(crop, target);
}

}  // namespace ipmix
