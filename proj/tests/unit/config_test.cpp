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

#include <gtest/gtest.h>

#include <sstream>

#include "ipmix/errors.hpp"

namespace ipmix {
namespace {

KeyValues parse(const std::string& text) {
  std::istringstream in(text);
  return parse_key_values(in);
}

TEST(KeyValuesTest, Parses) {
  const auto kv = parse("# comment\n\n  k = 4 \nmix_ops=addition, multiplication\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("k"), "4");
  EXPECT_EQ(kv.at("mix_ops"), "addition, multiplication");
}

TEST(KeyValuesTest, ErrorsNameTheLine) {
  try {
    parse("k = 1\nbroken\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("k = 1\nk = 2\n"), ConfigError);
  EXPECT_THROW(parse(" = 2\n"), ConfigError);
  EXPECT_THROW(read_key_values("/nonexistent/ipmix.cfg"), IoError);
}

TEST(ApplyKeyValuesTest, OverlaysFields) {
  RunConfig cfg;
  apply_key_values(parse("k = 4\nt = 2\nalpha = 0.5\nframework = mixed_input\n"
                         "patch_sizes = 8,16\nscar_enabled = false\n"
                         "mix_ops = addition,random_pixel\nop_bank = invert,mirror\n"
                         "fractal_prob = 0.25\nforce_method = p_level\nseed = 99\n"
                         "workers = 3\nfractals = /tmp/f\nn_escape = 5\nn_ifs = 6\n"
                         "suffix = _aug\n"),
                   cfg);
  EXPECT_EQ(cfg.augment.k, 4);
  EXPECT_EQ(cfg.augment.t, 2);
  EXPECT_EQ(cfg.augment.alpha, 0.5);
  EXPECT_EQ(cfg.augment.framework, Framework::kMixedInput);
  EXPECT_EQ(cfg.augment.patch_sizes, (std::vector<int>{8, 16}));
  EXPECT_FALSE(cfg.augment.scar_enabled);
  EXPECT_EQ(cfg.augment.mix_ops,
            (std::vector<MixKind>{MixKind::kAddition, MixKind::kRandomPixel}));
  EXPECT_EQ(cfg.augment.op_bank, (std::vector<ImageOp>{ImageOp::kInvert, ImageOp::kMirror}));
  EXPECT_EQ(cfg.augment.fractal_prob, 0.25);
  EXPECT_EQ(cfg.augment.force_method, Method::kPLevel);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.workers, 3);
  EXPECT_EQ(cfg.fractals, std::filesystem::path("/tmp/f"));
  EXPECT_EQ(cfg.n_escape, 5u);
  EXPECT_EQ(cfg.n_ifs, 6u);
  EXPECT_EQ(cfg.suffix, "_aug");
  cfg.augment.validate();
}

TEST(ApplyKeyValuesTest, Rejects) {
  RunConfig cfg;
  EXPECT_THROW(apply_key_values(parse("bogus = 1\n"), cfg), ConfigError);
  EXPECT_THROW(apply_key_values(parse("k = three\n"), cfg), ConfigError);
  EXPECT_THROW(apply_key_values(parse("k = 3x\n"), cfg), ConfigError);
  EXPECT_THROW(apply_key_values(parse("framework = sideways\n"), cfg), ConfigError);
  EXPECT_THROW(apply_key_values(parse("op_bank = invert,fog\n"), cfg), ConfigError);
  EXPECT_THROW(apply_key_values(parse("scar_enabled = maybe\n"), cfg), ConfigError);
  EXPECT_THROW(apply_key_values(parse("force_method = always\n"), cfg), ConfigError);
}

TEST(ScalarParseTest, Strict) {
  EXPECT_EQ(parse_int("k", "-3"), -3);
  EXPECT_EQ(parse_double("a", "0.125"), 0.125);
  EXPECT_TRUE(parse_bool("b", "true"));
  EXPECT_FALSE(parse_bool("b", "0"));
  EXPECT_EQ(parse_u64("s", "18446744073709551615"), 18446744073709551615ull);
  EXPECT_THROW(parse_int("k", ""), ConfigError);
  EXPECT_THROW(parse_double("a", "1.0.0"), ConfigError);
  EXPECT_THROW(parse_u64("s", "-1"), ConfigError);
}

TEST(ConfigHashTest, StableAndSensitive) {
  AugmentConfig a;
  AugmentConfig b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 64u);
  b.k = 4;
  EXPECT_NE(config_hash(a), config_hash(b));
  RunConfig run;
  EXPECT_FALSE(to_json(run).contains("workers"));
  const auto augment = to_json(run.augment);
  const auto full = to_json(run);
  for (const auto& [key, value] : augment.items()) EXPECT_EQ(full[key], value) << key;
}

}  // namespace
}  // namespace ipmix
