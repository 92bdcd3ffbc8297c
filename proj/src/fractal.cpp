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

#include "ipmix/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "ipmix/codec.hpp"
#include "ipmix/dataset.hpp"
#include "ipmix/errors.hpp"
#include "ipmix/util.hpp"
#include "json.hpp"

namespace ipmix {
namespace {

using nlohmann::json;

constexpr int kMaxRenderAttempts = 12;
constexpr double kMaxDominantFraction = 0.95;

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

Rgb random_color(SeededRng& rng, double lo = 0.0, double hi = 1.0) {
  Rgb c;
  c.r = rng.uniform(lo, hi);
  c.g = rng.uniform(lo, hi);
  c.b = rng.uniform(lo, hi);
  return c;
}

void put(ImageBuffer& img, int y, int x, const Rgb& c) {
  img.at(y, x, 0) = std::clamp(c.r, 0.0, 1.0);
  img.at(y, x, 1) = std::clamp(c.g, 0.0, 1.0);
  img.at(y, x, 2) = std::clamp(c.b, 0.0, 1.0);
}

void check_palette(const Palette& palette) {
  if (palette.empty()) throw ParameterError("palette must not be empty");
}

json to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

json to_json(const Palette& palette) {
  json out = json::array();
  for (const auto& c : palette) out.push_back(to_json(c));
  return out;
}

}  // namespace

Palette random_palette(SeededRng& rng) {
  constexpr int kSize = 256;
  const int anchors = rng.uniform_int(3, 5);
  std::vector<Rgb> colors;
  for (int i = 0; i < anchors; ++i) colors.push_back(random_color(rng));
  Palette palette(kSize);
  for (int i = 0; i < kSize; ++i) {
    const double pos = static_cast<double>(i) * anchors / kSize;
    const int a = static_cast<int>(pos);
    palette[i] = lerp(colors[a], colors[(a + 1) % anchors], pos - a);
  }
  const auto offset = static_cast<std::ptrdiff_t>(rng.uniform_index(kSize));
  std::rotate(palette.begin(), palette.begin() + offset, palette.end());
  return palette;
}

double OrbitTrap::distance(Complex z) const {
  switch (kind) {
    case Kind::kNone:
      return 0.0;
    case Kind::kPoint:
      return std::abs(z - point);
    case Kind::kLine:
      return axis == Axis::kReal ? std::abs(z.imag()) : std::abs(z.real());
  }
  return 0.0;
}

EscapeResult escape_iterations(Complex z0, Complex c, int max_iter, double bailout,
                               const OrbitTrap& trap) {
  const bool tracking = trap.kind != OrbitTrap::Kind::kNone;
  const double limit = bailout * bailout;
  double zr = z0.real();
  double zi = z0.imag();
  const double cr = c.real();
  const double ci = c.imag();
  double trap_d = tracking ? trap.distance(z0) : 0.0;
  for (int n = 1; n <= max_iter; ++n) {
    const double nr = zr * zr - zi * zi + cr;
    zi = 2.0 * zr * zi + ci;
    zr = nr;
    if (zr * zr + zi * zi > limit) return {n, trap_d};
    if (tracking) trap_d = std::min(trap_d, trap.distance({zr, zi}));
  }
  return {max_iter, trap_d};
}

void validate(const EscapeTimeSpec& spec) {
  if (spec.max_iter < 1) throw ParameterError("max_iter must be at least 1");
  if (!(spec.bailout >= 2.0)) throw ParameterError("bailout must be at least 2");
  const auto& v = spec.viewport;
  if (!(v.re_max > v.re_min && v.im_max > v.im_min)) {
    throw ParameterError("viewport must have positive area");
  }
  if (spec.size.height < 1 || spec.size.width < 1) throw ParameterError("render size must be positive");
  check_palette(spec.palette);
}

std::vector<EscapeResult> escape_grid(const EscapeTimeSpec& spec) {
  validate(spec);
  const int h = spec.size.height;
  const int w = spec.size.width;
  const auto& v = spec.viewport;
  std::vector<EscapeResult> grid(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    const double im = v.im_max - (y + 0.5) / h * (v.im_max - v.im_min);
    for (int x = 0; x < w; ++x) {
      const double re = v.re_min + (x + 0.5) / w * (v.re_max - v.re_min);
      const Complex p{re, im};
      grid[static_cast<std::size_t>(y) * w + x] =
          spec.kind == EscapeTimeSpec::Kind::kMandelbrot
              ? escape_iterations({0.0, 0.0}, p, spec.max_iter, spec.bailout, spec.trap)
              : escape_iterations(p, spec.c, spec.max_iter, spec.bailout, spec.trap);
    }
  }
  return grid;
}

ImageBuffer render_escape_time(const EscapeTimeSpec& spec) {
  const auto grid = escape_grid(spec);
  const int h = spec.size.height;
  const int w = spec.size.width;
  const auto entries = static_cast<double>(spec.palette.size());
  const double norm = std::log1p(static_cast<double>(spec.max_iter));
  ImageBuffer img(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& r = grid[static_cast<std::size_t>(y) * w + x];
      if (r.count >= spec.max_iter) {
        put(img, y, x, spec.interior);
        continue;
      }
      const double t = 0.5 * std::log1p(static_cast<double>(r.count)) / norm +
                       0.5 * std::exp(-r.trap_distance);
      const auto idx = std::min(spec.palette.size() - 1,
                                static_cast<std::size_t>(std::max(0.0, t * entries)));
      put(img, y, x, spec.palette[idx]);
    }
  }
  return img;
}

double AffineMap::operator_norm() const {
  const double s = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::max(0.0, s * s - 4.0 * det * det);
  return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

std::array<double, 2> AffineMap::fixed_point() const {
  // (I - A) p = t
  const double m00 = 1.0 - a;
  const double m01 = -b;
  const double m10 = -c;
  const double m11 = 1.0 - d;
  const double det = m00 * m11 - m01 * m10;
  if (std::abs(det) < 1e-15) throw ParameterError("affine map has no unique fixed point");
  return {(e * m11 - m01 * f) / det, (m00 * f - m10 * e) / det};
}

void validate(const IfsSpec& spec) {
  if (spec.maps.size() < 2) throw ParameterError("IFS needs at least two maps");
  double total = 0.0;
  for (const auto& m : spec.maps) {
    if (!(m.probability >= 0.0)) throw ParameterError("IFS map probability must be non-negative");
    if (!(m.operator_norm() < 1.0)) throw ParameterError("IFS map is not a contraction");
    total += m.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("IFS probabilities must sum to 1");
  if (spec.size.height < 1 || spec.size.width < 1) throw ParameterError("render size must be positive");
  if (spec.n_points == 0) throw ParameterError("n_points must be positive");
  check_palette(spec.palette);
}

std::vector<IfsSample> chaos_game(const IfsSpec& spec, SeededRng& rng) {
  validate(spec);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& m : spec.maps) {
    acc += m.probability;
    cumulative.push_back(acc);
  }
  const auto start = spec.maps.front().fixed_point();
  double x = start[0];
  double y = start[1];
  std::vector<IfsSample> out;
  out.reserve(spec.n_points);
  const std::size_t total = spec.burn_in + spec.n_points;
  for (std::size_t i = 0; i < total; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto k = std::min<std::size_t>(it - cumulative.begin(), spec.maps.size() - 1);
    const auto& m = spec.maps[k];
    const double nx = m.a * x + m.b * y + m.e;
    const double ny = m.c * x + m.d * y + m.f;
    x = nx;
    y = ny;
    if (i >= spec.burn_in) out.push_back({{x, y}, k});
  }
  return out;
}

ImageBuffer render_ifs(const IfsSpec& spec, SeededRng& rng) {
  const auto samples = chaos_game(spec, rng);
  double xmin = samples.front().point.x, xmax = xmin;
  double ymin = samples.front().point.y, ymax = ymin;
  for (const auto& s : samples) {
    xmin = std::min(xmin, s.point.x);
    xmax = std::max(xmax, s.point.x);
    ymin = std::min(ymin, s.point.y);
    ymax = std::max(ymax, s.point.y);
  }
  const double pad_x = std::max(0.05 * (xmax - xmin), 1e-9);
  const double pad_y = std::max(0.05 * (ymax - ymin), 1e-9);
  xmin -= pad_x;
  xmax += pad_x;
  ymin -= pad_y;
  ymax += pad_y;

  const int h = spec.size.height;
  const int w = spec.size.width;
  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  std::vector<double> hits(pixels, 0.0);
  std::vector<Rgb> color_sum(pixels);
  const std::size_t n_maps = spec.maps.size();
  Rgb running = spec.palette.front();
  for (const auto& s : samples) {
    // Running average toward the map's palette color gives smooth gradients
    // along the attractor.
    const Rgb& target = spec.palette[s.map_index * spec.palette.size() / n_maps];
    running = lerp(running, target, 0.5);
    const int px = std::clamp(
        static_cast<int>((s.point.x - xmin) / (xmax - xmin) * w), 0, w - 1);
    const int py = std::clamp(
        static_cast<int>((ymax - s.point.y) / (ymax - ymin) * h), 0, h - 1);
    const std::size_t p = static_cast<std::size_t>(py) * w + px;
    hits[p] += 1.0;
    color_sum[p].r += running.r;
    color_sum[p].g += running.g;
    color_sum[p].b += running.b;
  }
  const double peak = std::log1p(*std::max_element(hits.begin(), hits.end()));
  ImageBuffer img(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if (hits[p] == 0.0) {
        put(img, y, x, spec.background);
        continue;
      }
      const double density = std::sqrt(std::log1p(hits[p]) / peak);
      const Rgb mean{color_sum[p].r / hits[p], color_sum[p].g / hits[p],
                     color_sum[p].b / hits[p]};
      put(img, y, x, lerp(spec.background, mean, density));
    }
  }
  return img;
}

namespace {

IfsSpec homothety_system(const std::vector<Point2>& anchors, double scale) {
  IfsSpec spec;
  for (const auto& v : anchors) {
    AffineMap m;
    m.a = scale;
    m.d = scale;
    m.e = (1.0 - scale) * v.x;
    m.f = (1.0 - scale) * v.y;
    m.probability = 1.0 / static_cast<double>(anchors.size());
    spec.maps.push_back(m);
  }
  spec.palette = {{1.0, 1.0, 1.0}};
  return spec;
}

}  // namespace

IfsSpec sierpinski_triangle() {
  return homothety_system({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}, 0.5);
}

IfsSpec sierpinski_carpet() {
  std::vector<Point2> anchors;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == 1 && j == 1) continue;
      anchors.push_back({0.5 * i, 0.5 * j});
    }
  }
  return homothety_system(anchors, 1.0 / 3.0);
}

IfsSpec cantor_dust() {
  return homothety_system({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}, 1.0 / 3.0);
}

const char* to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::kEscapeTime:
      return "escape_time";
    case SourceTag::kIfs:
      return "ifs";
    case SourceTag::kExternal:
      return "external";
  }
  return "external";
}

MixingSet MixingSet::resized(Dims dims) const {
  std::vector<MixingEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    MixingEntry copy;
    copy.image = e.image.dims() == dims ? e.image : center_crop_resize(e.image, dims);
    copy.source = e.source;
    copy.spec_hash = e.spec_hash;
    copy.origin = e.origin;
    out.push_back(std::move(copy));
  }
  return MixingSet(std::move(out));
}

EscapeTimeSpec random_escape_spec(Dims size, SeededRng& rng) {
  EscapeTimeSpec spec;
  spec.size = size;
  spec.max_iter = rng.uniform_int(64, 160);
  const double aspect = static_cast<double>(size.width) / size.height;
  Complex center;
  double half_h;
  if (rng.bernoulli(0.5)) {
    spec.kind = EscapeTimeSpec::Kind::kJulia;
    // |c| uniform in area over the annulus 0.3 <= |c| <= 1.2.
    const double r = std::sqrt(rng.uniform(0.3 * 0.3, 1.2 * 1.2));
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    spec.c = std::polar(r, theta);
    center = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    half_h = rng.uniform(1.0, 1.6);
  } else {
    spec.kind = EscapeTimeSpec::Kind::kMandelbrot;
    center = {-0.75, 0.1};
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Complex candidate{rng.uniform(-2.0, 0.5), rng.uniform(-1.2, 1.2)};
      const int n = escape_iterations({0.0, 0.0}, candidate, spec.max_iter, 2.0).count;
      // Slow-escaping points sit close to the set boundary.
      if (n >= 12 && n < spec.max_iter) {
        center = candidate;
        break;
      }
    }
    half_h = std::exp(rng.uniform(std::log(0.003), std::log(0.6)));
  }
  spec.viewport = {center.real() - half_h * aspect, center.real() + half_h * aspect,
                   center.imag() - half_h, center.imag() + half_h};
  switch (rng.uniform_int(0, 2)) {
    case 0:
      spec.trap.kind = OrbitTrap::Kind::kNone;
      break;
    case 1:
      spec.trap.kind = OrbitTrap::Kind::kPoint;
      spec.trap.point = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
      break;
    default:
      spec.trap.kind = OrbitTrap::Kind::kLine;
      spec.trap.axis = rng.bernoulli(0.5) ? OrbitTrap::Axis::kReal : OrbitTrap::Axis::kImaginary;
      break;
  }
  spec.palette = random_palette(rng);
  spec.interior = random_color(rng, 0.0, 0.3);
  return spec;
}

IfsSpec random_ifs_spec(Dims size, SeededRng& rng) {
  for (;;) {
    IfsSpec spec;
    spec.size = size;
    const int n_maps = rng.uniform_int(2, 4);
    double total = 0.0;
    for (int i = 0; i < n_maps; ++i) {
      // A = R(theta) diag(s1, s2) R(phi); operator norm is max(|s1|, |s2|).
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double s1 = rng.uniform(0.3, 0.8);
      const double s2 = rng.uniform(0.3, 0.8) * (rng.bernoulli(0.5) ? -1.0 : 1.0);
      const double ct = std::cos(theta), st = std::sin(theta);
      const double cp = std::cos(phi), sp = std::sin(phi);
      AffineMap m;
      m.a = ct * s1 * cp - st * s2 * sp;
      m.b = -ct * s1 * sp - st * s2 * cp;
      m.c = st * s1 * cp + ct * s2 * sp;
      m.d = -st * s1 * sp + ct * s2 * cp;
      m.e = rng.uniform(-1.0, 1.0);
      m.f = rng.uniform(-1.0, 1.0);
      m.probability = std::abs(m.a * m.d - m.b * m.c) + 0.02;
      total += m.probability;
      spec.maps.push_back(m);
    }
    for (auto& m : spec.maps) m.probability /= total;
    spec.n_points = std::max<std::size_t>(20000, 2 * static_cast<std::size_t>(size.height) * size.width);
    spec.burn_in = 20;
    spec.palette = random_palette(rng);
    spec.background = random_color(rng, 0.0, 0.35);
    try {
      validate(spec);
      return spec;
    } catch (const ParameterError&) {
      // Rounding pushed a map to norm >= 1 or the probabilities off the
      // simplex; draw again.
    }
  }
}

double dominant_color_fraction(const ImageBuffer& img) {
  std::unordered_map<std::uint32_t, std::size_t> counts;
  const auto data = img.data();
  std::size_t best = 0;
  for (std::size_t i = 0; i < data.size(); i += 3) {
    const std::uint32_t key = (static_cast<std::uint32_t>(quantize(data[i])) << 16) |
                              (static_cast<std::uint32_t>(quantize(data[i + 1])) << 8) |
                              quantize(data[i + 2]);
    best = std::max(best, ++counts[key]);
  }
  return static_cast<double>(best) / static_cast<double>(data.size() / 3);
}

std::string spec_hash(const EscapeTimeSpec& spec) {
  json j;
  j["kind"] = spec.kind == EscapeTimeSpec::Kind::kMandelbrot ? "mandelbrot" : "julia";
  j["c"] = {spec.c.real(), spec.c.imag()};
  j["viewport"] = {spec.viewport.re_min, spec.viewport.re_max, spec.viewport.im_min,
                   spec.viewport.im_max};
  j["max_iter"] = spec.max_iter;
  j["bailout"] = spec.bailout;
  j["trap"] = {static_cast<int>(spec.trap.kind), spec.trap.point.real(),
               spec.trap.point.imag(), static_cast<int>(spec.trap.axis)};
  j["palette"] = to_json(spec.palette);
  j["interior"] = to_json(spec.interior);
  j["size"] = {spec.size.height, spec.size.width};
  return sha256_hex(j.dump());
}

std::string spec_hash(const IfsSpec& spec) {
  json j;
  json maps = json::array();
  for (const auto& m : spec.maps) maps.push_back({m.a, m.b, m.c, m.d, m.e, m.f, m.probability});
  j["maps"] = maps;
  j["n_points"] = spec.n_points;
  j["burn_in"] = spec.burn_in;
  j["size"] = {spec.size.height, spec.size.width};
  j["palette"] = to_json(spec.palette);
  j["background"] = to_json(spec.background);
  return sha256_hex(j.dump());
}

MixingSet build_mixing_set(const MixingSetOptions& options, SeededRng& rng,
                           std::vector<std::string>* warnings) {
  const std::uint64_t base = rng.next_u64();
  const std::size_t generated = options.n_escape + options.n_ifs;
  std::vector<MixingEntry> entries(generated);

  parallel_for(generated, options.workers, [&](std::size_t i) {
    SeededRng local = SeededRng::child(base, i);
    MixingEntry& entry = entries[i];
    if (i < options.n_escape) {
      entry.source = SourceTag::kEscapeTime;
      for (int attempt = 0; attempt < kMaxRenderAttempts; ++attempt) {
        const EscapeTimeSpec spec = random_escape_spec(options.size, local);
        entry.image = render_escape_time(spec);
        entry.spec_hash = spec_hash(spec);
        if (dominant_color_fraction(entry.image) <= kMaxDominantFraction) break;
      }
    } else {
      entry.source = SourceTag::kIfs;
      for (int attempt = 0; attempt < kMaxRenderAttempts; ++attempt) {
        const IfsSpec spec = random_ifs_spec(options.size, local);
        entry.image = render_ifs(spec, local);
        entry.spec_hash = spec_hash(spec);
        if (dominant_color_fraction(entry.image) <= kMaxDominantFraction) break;
      }
    }
  });

  if (options.external_dir) {
    const auto paths = enumerate(DatasetSource{*options.external_dir});
    std::size_t loaded = 0;
    for (const auto& path : paths) {
      try {
        const Bytes bytes = read_file(path);
        MixingEntry entry;
        entry.image = center_crop_resize(decode(bytes), options.size);
        entry.source = SourceTag::kExternal;
        entry.spec_hash = sha256_hex(bytes);
        entry.origin = path.string();
        entries.push_back(std::move(entry));
        ++loaded;
      } catch (const std::exception& e) {
        if (warnings != nullptr) warnings->push_back("skipping " + path.string() + ": " + e.what());
      }
    }
    if (!paths.empty() && loaded == 0) {
      throw ConfigError("no readable images in " + options.external_dir->string());
    }
  }
  if (entries.empty()) throw ConfigError("mixing set would be empty");
  return MixingSet(std::move(entries));
}

MixingSet load_mixing_set(const std::filesystem::path& dir, std::vector<std::string>* warnings) {
  std::vector<MixingEntry> entries;
  for (const auto& path : enumerate(DatasetSource{dir})) {
    try {
      const Bytes bytes = read_file(path);
      MixingEntry entry;
      entry.image = decode(bytes);
      entry.source = SourceTag::kExternal;
      entry.spec_hash = sha256_hex(bytes);
      entry.origin = path.string();
      entries.push_back(std::move(entry));
    } catch (const std::exception& e) {
      if (warnings != nullptr) warnings->push_back("skipping " + path.string() + ": " + e.what());
    }
  }
  if (entries.empty()) throw ConfigError("no readable mixing images in " + dir.string());
  return MixingSet(std::move(entries));
}

}  // namespace ipmix
