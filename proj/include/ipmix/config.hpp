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
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "ipmix/pipeline.hpp"
#include "json.hpp"

namespace ipmix {

// Ordered key -> raw value pairs from a config file.
using KeyValues = std::map<std::string, std::string>;

/**
 * Config file format: one `key = value` per line. Blank lines and lines whose
 * first non-space character is `#` are ignored; surrounding whitespace is
 * trimmed. Lists are comma-separated. Duplicate keys, lines without `=` and
 * empty keys throw ConfigError (with the line number).
 */
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

// Everything the `augment` and `bench` subcommands read from a config file.
struct RunConfig {
  AugmentConfig augment;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<std::filesystem::path> fractals;  // prebuilt mixing set directory
  std::size_t n_escape = 100;  // generated when no fractal directory is given
  std::size_t n_ifs = 100;
  std::string suffix = "_ipmix";
};

/**
 * Overlays `values` on `cfg`. Recognized keys:
 *   k t alpha framework patch_sizes scar_enabled mix_ops op_bank fractal_prob
 *   force_method seed workers fractals n_escape n_ifs suffix
 * Unknown keys and unparsable values throw ConfigError.
 */
void apply_key_values(const KeyValues& values, RunConfig& cfg);

nlohmann::json to_json(const AugmentConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

// SHA-256 of the canonical JSON form of the augmentation settings.
std::string config_hash(const AugmentConfig& cfg);

// Strict scalar parsers shared with the CLI; ConfigError names `key`.
int parse_int(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);

}  // namespace ipmix
