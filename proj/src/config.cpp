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

#include "ipmix/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ipmix/errors.hpp"
#include "ipmix/util.hpp"

namespace ipmix {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty list element");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty()) {
    throw ConfigError(key + ": cannot parse '" + value + "'");
  }
  return out;
}

}  // namespace

int parse_int(const std::string& key, const std::string& value) {
  return parse_number<int>(key, value);
}

double parse_double(const std::string& key, const std::string& value) {
  return parse_number<double>(key, value);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  return parse_number<std::uint64_t>(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_key_values(in);
}

void apply_key_values(const KeyValues& values, RunConfig& cfg) {
  AugmentConfig& a = cfg.augment;
  for (const auto& [key, value] : values) {
    try {
      if (key == "k") {
        a.k = parse_int(key, value);
      } else if (key == "t") {
        a.t = parse_int(key, value);
      } else if (key == "alpha") {
        a.alpha = parse_double(key, value);
      } else if (key == "framework") {
        a.framework = framework_from_string(value);
      } else if (key == "patch_sizes") {
        a.patch_sizes.clear();
        for (const auto& s : split_list(key, value)) a.patch_sizes.push_back(parse_int(key, s));
      } else if (key == "scar_enabled") {
        a.scar_enabled = parse_bool(key, value);
      } else if (key == "mix_ops") {
        a.mix_ops.clear();
        for (const auto& s : split_list(key, value)) a.mix_ops.push_back(mix_kind_from_string(s));
      } else if (key == "op_bank") {
        a.op_bank.clear();
        for (const auto& s : split_list(key, value)) a.op_bank.push_back(image_op_from_string(s));
      } else if (key == "fractal_prob") {
        a.fractal_prob = parse_double(key, value);
      } else if (key == "force_method") {
        if (value == "none") {
          a.force_method.reset();
        } else if (value == "image") {
          a.force_method = Method::kImageLevel;
        } else if (value == "p_level") {
          a.force_method = Method::kPLevel;
        } else {
          throw ConfigError("force_method: expected none, image or p_level");
        }
      } else if (key == "seed") {
        cfg.seed = parse_u64(key, value);
      } else if (key == "workers") {
        cfg.workers = parse_int(key, value);
        if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
      } else if (key == "fractals") {
        cfg.fractals = value;
      } else if (key == "n_escape") {
        cfg.n_escape = parse_u64(key, value);
      } else if (key == "n_ifs") {
        cfg.n_ifs = parse_u64(key, value);
      } else if (key == "suffix") {
        cfg.suffix = value;
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const ParameterError& e) {
      // Name lookups (mix ops, image ops) report ParameterError.
      throw ConfigError(key + ": " + e.what());
    }
  }
}

json to_json(const AugmentConfig& cfg) {
  json mix_ops = json::array();
  for (MixKind k : cfg.mix_ops) mix_ops.push_back(std::string(to_string(k)));
  json op_bank = json::array();
  for (ImageOp op : cfg.op_bank) op_bank.push_back(std::string(to_string(op)));
  return {{"k", cfg.k},
          {"t", cfg.t},
          {"alpha", cfg.alpha},
          {"framework", std::string(to_string(cfg.framework))},
          {"patch_sizes", cfg.patch_sizes},
          {"scar_enabled", cfg.scar_enabled},
          {"mix_ops", std::move(mix_ops)},
          {"op_bank", std::move(op_bank)},
          {"fractal_prob", cfg.fractal_prob},
          {"force_method", cfg.force_method ? json(std::string(to_string(*cfg.force_method)))
                                            : json(nullptr)}};
}

json to_json(const RunConfig& cfg) {
  json j = to_json(cfg.augment);
  j["seed"] = cfg.seed;
  j["fractals"] = cfg.fractals ? json(cfg.fractals->generic_string()) : json(nullptr);
  j["n_escape"] = cfg.n_escape;
  j["n_ifs"] = cfg.n_ifs;
  j["suffix"] = cfg.suffix;
  // The worker count is deliberately absent: it never changes outputs.
  return j;
}

std::string config_hash(const AugmentConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

}  // namespace ipmix
