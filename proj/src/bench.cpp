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

#include "ipmix/bench.hpp"

#include <atomic>
#include <chrono>
#include <vector>

#include "ipmix/config.hpp"
#include "ipmix/errors.hpp"
#include "ipmix/util.hpp"

namespace ipmix {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Nanosecond accumulator shared by workers.
struct StageClock {
  std::atomic<std::int64_t> decode{0};
  std::atomic<std::int64_t> augment{0};
  std::atomic<std::int64_t> encode{0};

  static void add(std::atomic<std::int64_t>& slot, Clock::time_point start) {
    slot += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
  }
  StageTimes seconds() const {
    return {decode.load() * 1e-9, augment.load() * 1e-9, encode.load() * 1e-9};
  }
};

void identity_pass(std::span<const Bytes> encoded, int workers) {
  parallel_for(encoded.size(), workers, [&](std::size_t i) {
    const ImageBuffer img = decode(encoded[i]);
    const Bytes out = encode_png(img);
    if (out.empty()) throw IoError("empty PNG encoding");
  });
}

void full_pass(std::span<const Bytes> encoded, const Augmenter& augmenter,
               const BenchOptions& options, StageClock* clock, std::vector<std::string>* hashes) {
  parallel_for(encoded.size(), options.workers, [&](std::size_t i) {
    auto t0 = Clock::now();
    const ImageBuffer img = decode(encoded[i]);
    if (clock != nullptr) StageClock::add(clock->decode, t0);
    t0 = Clock::now();
    SeededRng rng = SeededRng::child(options.seed, i);
    const ImageBuffer out = augmenter.augment(img, rng).image;
    if (clock != nullptr) StageClock::add(clock->augment, t0);
    t0 = Clock::now();
    const Bytes png = encode_png(out);
    if (clock != nullptr) StageClock::add(clock->encode, t0);
    if (hashes != nullptr) (*hashes)[i] = sha256_hex(png);
  });
}

}  // namespace

nlohmann::json to_json(const BenchReport& r) {
  return {{"images_per_sec", r.images_per_sec},
          {"baseline_images_per_sec", r.baseline_images_per_sec},
          {"throughput_ratio", r.throughput_ratio},
          {"overhead_ratio", r.overhead_ratio},
          {"stage_seconds",
           {{"decode", r.stages.decode}, {"augment", r.stages.augment}, {"encode", r.stages.encode}}},
          {"wall_seconds", r.wall_seconds},
          {"images", r.images},
          {"workers", r.workers},
          {"config_hash", r.config_hash},
          {"output_hash", r.output_hash}};
}

BenchReport run_bench(std::span<const Bytes> encoded, const Augmenter& augmenter,
                      const BenchOptions& options) {
  if (encoded.empty()) throw ParameterError("bench needs at least one image");
  if (options.workers < 1) throw ParameterError("bench needs at least one worker");
  const std::size_t n = encoded.size();

  // Warm-up: page in code, fill the partner-resize cache, settle allocators.
  identity_pass(encoded, options.workers);
  std::vector<std::string> hashes(n);
  full_pass(encoded, augmenter, options, nullptr, &hashes);

  BenchReport report;
  report.workers = options.workers;
  report.config_hash = config_hash(augmenter.config());
  std::string joined;
  for (const auto& h : hashes) joined += h + "\n";
  report.output_hash = sha256_hex(joined);

  std::size_t baseline_images = 0;
  auto start = Clock::now();
  do {
    identity_pass(encoded, options.workers);
    baseline_images += n;
  } while (seconds_since(start) < options.duration_sec);
  report.baseline_images_per_sec = static_cast<double>(baseline_images) / seconds_since(start);

  StageClock clock;
  start = Clock::now();
  do {
    full_pass(encoded, augmenter, options, &clock, nullptr);
    report.images += n;
  } while (seconds_since(start) < options.duration_sec);
  report.wall_seconds = seconds_since(start);
  report.images_per_sec = static_cast<double>(report.images) / report.wall_seconds;
  report.stages = clock.seconds();
  report.throughput_ratio = report.images_per_sec / report.baseline_images_per_sec;
  report.overhead_ratio = report.baseline_images_per_sec / report.images_per_sec;
  return report;
}

BenchReport run_bench(const DatasetSource& src, const Augmenter& augmenter,
                      const BenchOptions& options) {
  const auto paths = enumerate(src);
  if (paths.empty()) throw IoError("no images under " + src.root.string());
  std::vector<Bytes> encoded;
  encoded.reserve(paths.size());
  for (const auto& p : paths) encoded.push_back(read_file(p));
  return run_bench(encoded, augmenter, options);
}

}  // namespace ipmix
