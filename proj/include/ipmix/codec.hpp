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
#include <filesystem>
#include <span>
#include <vector>

#include "ipmix/image.hpp"

namespace ipmix {

using Bytes = std::vector<std::uint8_t>;

// Decodes PNG or JPEG (sniffed from the magic bytes). 8-bit samples map to
// v / 255, grayscale is promoted to RGB, alpha is dropped and 16-bit PNGs are
// reduced to 8 bits. Throws DecodeError.
ImageBuffer decode(std::span<const std::uint8_t> bytes);

// Quantizes with round-half-up, floor(v * 255 + 0.5), and writes an 8-bit RGB
// PNG with a fixed zlib level and no ancillary chunks, so equal buffers give
// equal bytes.
Bytes encode_png(const ImageBuffer& img);

// round-half-up quantization used by encode_png.
std::uint8_t quantize(double v);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

ImageBuffer load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace ipmix
