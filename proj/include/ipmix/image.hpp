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

#include <cstddef>
#include <span>
#include <vector>

namespace ipmix {

struct Dims {
  int height = 0;
  int width = 0;

  bool operator==(const Dims&) const = default;
};

/**
 * H x W x 3 RGB image, row-major interleaved, samples in [0, 1].
 *
 * Samples are doubles: mixing and strength-parameterized transforms compose
 * without intermediate quantization, which only happens at PNG encode.
 */
class ImageBuffer {
 public:
  static constexpr int kChannels = 3;

  ImageBuffer() = default;
  ImageBuffer(int height, int width, double fill = 0.0);
  // Takes ownership of `data`; throws ParameterError on a size mismatch or a
  // sample outside [0, 1].
  ImageBuffer(int height, int width, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  Dims dims() const noexcept { return {height_, width_}; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> data() const noexcept { return data_; }
  // Callers writing through this must keep samples in [0, 1].
  std::span<double> mutable_data() noexcept { return data_; }

  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }
  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }

  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  bool operator==(const ImageBuffer&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// Per-pixel (1 channel) or per-sample (3 channel) weights in [0, 1]. A
// single-channel mask applies identically to all image channels.
class MaskBuffer {
 public:
  MaskBuffer(int height, int width, int channels, double fill = 0.0);
  MaskBuffer(int height, int width, int channels, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> mutable_data() noexcept { return data_; }

  // Weight applied to image sample (y, x, c); broadcasts single-channel masks.
  double weight(int y, int x, int c) const {
    const int cc = channels_ == 1 ? 0 : c;
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + cc];
  }

 private:
  int height_;
  int width_;
  int channels_;
  std::vector<double> data_;
};

// mask * x1 + (1 - mask) * x2, elementwise.
ImageBuffer blend_convex(const ImageBuffer& x1, const ImageBuffer& x2,
                         const MaskBuffer& mask);

// Clamps every sample into [0, 1] in place. NaN maps to 0.
void clamp_unit(std::span<double> samples);

// Bilinear resize using pixel-center alignment.
ImageBuffer resize_bilinear(const ImageBuffer& img, Dims target);

// Crops the largest centered window with the target aspect ratio, then resizes.
ImageBuffer center_crop_resize(const ImageBuffer& img, Dims target);

}  // namespace ipmix
