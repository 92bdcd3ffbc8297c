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
#include <string>

#include "ipmix/codec.hpp"
#include "ipmix/dataset.hpp"
#include "ipmix/pipeline.hpp"
#include "json.hpp"

namespace ipmix {

// Busy time per stage, summed over workers, in seconds.
struct StageTimes {
  double decode = 0.0;
  double augment = 0.0;
  double encode = 0.0;

  double total() const noexcept { return decode + augment + encode; }
};

struct BenchReport {
  double images_per_sec = 0.0;           // full pipeline: decode, augment, encode
  double baseline_images_per_sec = 0.0;  // identity pipeline: decode, encode
  double throughput_ratio = 0.0;         // images_per_sec / baseline_images_per_sec
  double overhead_ratio = 0.0;           // baseline_images_per_sec / images_per_sec
  StageTimes stages;                     // measured full-pipeline passes
  double wall_seconds = 0.0;             // measured full-pipeline passes
  std::size_t images = 0;                // images processed in measured full passes
  int workers = 1;
  std::string config_hash;
  std::string output_hash;  // over the encoded outputs of one full pass
};

nlohmann::json to_json(const BenchReport& report);

struct BenchOptions {
  int workers = 1;
  double duration_sec = 2.0;  // minimum measured time per pipeline
  std::uint64_t seed = 0;
};

/**
 * Measures the identity pipeline and the full augmentation pipeline over the
 * same encoded inputs. One warm-up pass of each is run first and excluded;
 * each pipeline then repeats whole passes until `duration_sec` has elapsed
 * (at least one pass). Item i of every pass uses SeededRng::child(seed, i),
 * so output_hash does not depend on the worker count.
 */
BenchReport run_bench(std::span<const Bytes> encoded, const Augmenter& augmenter,
                      const BenchOptions& options);

// Reads every file of `src` (I/O errors propagate) and benches it in memory.
BenchReport run_bench(const DatasetSource& src, const Augmenter& augmenter,
                      const BenchOptions& options);

}  // namespace ipmix
