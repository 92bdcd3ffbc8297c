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
#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ipmix/image.hpp"
#include "ipmix/rng.hpp"

namespace ipmix {

using Complex = std::complex<double>;

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  bool operator==(const Rgb&) const = default;
};

using Palette = std::vector<Rgb>;

// Smooth 256-entry gradient through 3-5 random anchor colors, rotated by a
// random offset.
Palette random_palette(SeededRng& rng);

// Trap geometry for orbit-trap coloring. A line trap is the real axis
// (Im z = 0) or the imaginary axis (Re z = 0).
struct OrbitTrap {
  enum class Kind { kNone, kPoint, kLine };
  enum class Axis { kReal, kImaginary };

  Kind kind = Kind::kNone;
  Complex point{0.0, 0.0};
  Axis axis = Axis::kReal;

  double distance(Complex z) const;
};

struct Viewport {
  double re_min = -2.0;
  double re_max = 1.0;
  double im_min = -1.5;
  double im_max = 1.5;
};

struct EscapeTimeSpec {
  enum class Kind { kMandelbrot, kJulia };

  Kind kind = Kind::kMandelbrot;
  Complex c{0.0, 0.0};  // Julia constant; ignored for Mandelbrot
  Viewport viewport;
  int max_iter = 100;
  double bailout = 2.0;
  OrbitTrap trap;
  Palette palette;
  Rgb interior;  // color of points that never escape
  Dims size{64, 64};
};

struct EscapeResult {
  int count = 0;
  double trap_distance = 0.0;
};

/**
 * Iterates z <- z^2 + c from z0. `count` is the first n >= 1 with
 * |z_n| > bailout, or max_iter when the orbit stays bounded. `trap_distance`
 * is the minimum distance to the trap over the non-escaped iterates z_0 ...
 * z_{count-1}, and 0 when the trap kind is none.
 */
EscapeResult escape_iterations(Complex z0, Complex c, int max_iter, double bailout,
                               const OrbitTrap& trap = {});

void validate(const EscapeTimeSpec& spec);

// Per-pixel escape results in row-major order. Pixel (y, x) samples the
// viewport at its center; y grows downward from im_max.
std::vector<EscapeResult> escape_grid(const EscapeTimeSpec& spec);

// Escaped pixels index the palette by 0.5 * log(1+n)/log(1+max_iter) +
// 0.5 * exp(-trap_distance); bounded orbits take `interior`. A pure function
// of the spec.
ImageBuffer render_escape_time(const EscapeTimeSpec& spec);

// (x, y) -> (a x + b y + e, c x + d y + f), chosen with `probability`.
struct AffineMap {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double e = 0.0, f = 0.0;
  double probability = 0.0;

  // Largest singular value of [[a, b], [c, d]].
  double operator_norm() const;
  // Solution of p = A p + t.
  std::array<double, 2> fixed_point() const;
};

struct IfsSpec {
  std::vector<AffineMap> maps;
  std::size_t n_points = 50000;
  std::size_t burn_in = 20;
  Dims size{64, 64};
  Palette palette;
  Rgb background;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

void validate(const IfsSpec& spec);

// Raw chaos-game stream: starts at the fixed point of the first map, discards
// burn_in iterates and returns the next n_points with the index of the map
// that produced each.
struct IfsSample {
  Point2 point;
  std::size_t map_index = 0;
};
std::vector<IfsSample> chaos_game(const IfsSpec& spec, SeededRng& rng);

// Hit density over the attractor bounding box, log-scaled and colored by the
// palette entry of the generating map over `background`.
ImageBuffer render_ifs(const IfsSpec& spec, SeededRng& rng);

// Canonical systems used as fixtures.
IfsSpec sierpinski_triangle();
IfsSpec sierpinski_carpet();
IfsSpec cantor_dust();

enum class SourceTag { kEscapeTime, kIfs, kExternal };
const char* to_string(SourceTag tag);

struct MixingEntry {
  ImageBuffer image;
  SourceTag source = SourceTag::kExternal;
  std::string spec_hash;  // SHA-256 of the generating spec, or of the file bytes
  std::string origin;     // source path for external images
};

// Immutable once built; entries may have differing dimensions.
class MixingSet {
 public:
  MixingSet() = default;
  explicit MixingSet(std::vector<MixingEntry> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const MixingEntry& entry(std::size_t i) const { return entries_.at(i); }
  const ImageBuffer& image(std::size_t i) const { return entries_.at(i).image; }
  const std::vector<MixingEntry>& entries() const noexcept { return entries_; }

  // Copy with every image center-cropped and resized to `dims`.
  MixingSet resized(Dims dims) const;

 private:
  std::vector<MixingEntry> entries_;
};

EscapeTimeSpec random_escape_spec(Dims size, SeededRng& rng);
IfsSpec random_ifs_spec(Dims size, SeededRng& rng);

// Fraction of pixels sharing the most common 8-bit color.
double dominant_color_fraction(const ImageBuffer& img);

struct MixingSetOptions {
  std::size_t n_escape = 0;
  std::size_t n_ifs = 0;
  std::optional<std::filesystem::path> external_dir;
  Dims size{224, 224};
  int workers = 1;
};

/**
 * Renders n_escape escape-time and n_ifs IFS images plus every decodable
 * image in external_dir (center-cropped and resized to `size`). Image i
 * draws from SeededRng::child(base, i) where base is one draw of `rng`, so
 * the result does not depend on the worker count. Unreadable external files
 * are skipped and reported through `warnings`; an empty result throws
 * ConfigError.
 */
MixingSet build_mixing_set(const MixingSetOptions& options, SeededRng& rng,
                           std::vector<std::string>* warnings = nullptr);

// Loads every PNG/JPEG under `dir` (sorted, non-recursive) as external entries.
MixingSet load_mixing_set(const std::filesystem::path& dir,
                          std::vector<std::string>* warnings = nullptr);

std::string spec_hash(const EscapeTimeSpec& spec);
std::string spec_hash(const IfsSpec& spec);

}  // namespace ipmix
