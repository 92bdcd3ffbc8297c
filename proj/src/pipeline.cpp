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

#include "ipmix/pipeline.hpp"

#include <algorithm>
#include <string>

#include "ipmix/errors.hpp"
#include "ipmix/util.hpp"

namespace ipmix {

using nlohmann::json;

std::string_view to_string(Framework f) {
  switch (f) {
    case Framework::kChainMixed:
      return "chain_mixed";
    case Framework::kLinearMix:
      return "linear_mix";
    case Framework::kMixedInput:
      return "mixed_input";
  }
  return "chain_mixed";
}

Framework framework_from_string(std::string_view name) {
  for (Framework f : {Framework::kChainMixed, Framework::kLinearMix, Framework::kMixedInput}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown framework: " + std::string(name));
}

std::string_view to_string(Method m) {
  return m == Method::kImageLevel ? "image" : "p_level";
}

namespace {

Method method_from_string(std::string_view name) {
  if (name == "image") return Method::kImageLevel;
  if (name == "p_level") return Method::kPLevel;
  throw ConfigError("unknown method in trace: " + std::string(name));
}

json op_to_json(const OpDraw& d) {
  return {{"op", std::string(to_string(d.op))}, {"strength", d.strength}};
}

OpDraw op_from_json(const json& j) {
  return {image_op_from_string(j.at("op").get<std::string>()), j.at("strength").get<double>()};
}

}  // namespace

void AugmentConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (t < 1) throw ConfigError("t must be at least 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (mix_ops.empty()) throw ConfigError("mix_ops must not be empty");
  if (op_bank.empty()) throw ConfigError("op_bank must not be empty");
  if (patch_sizes.empty()) throw ConfigError("patch_sizes must not be empty");
  for (int s : patch_sizes) {
    if (s < 1) throw ConfigError("patch sizes must be positive");
  }
  if (!(fractal_prob >= 0.0 && fractal_prob <= 1.0)) {
    throw ConfigError("fractal_prob must lie in [0,1]");
  }
}

json to_json(const AugmentTrace& trace) {
  json chains = json::array();
  for (const auto& chain : trace.chains) {
    json steps = json::array();
    for (const auto& step : chain.steps) {
      if (const auto* op = std::get_if<OpDraw>(&step)) {
        json s = op_to_json(*op);
        s["type"] = "image";
        steps.push_back(std::move(s));
        continue;
      }
      const auto& mix = std::get<MixStep>(step);
      json s;
      s["type"] = "mix";
      s["region"] = {mix.region.x0, mix.region.y0, mix.region.w, mix.region.h};
      s["lambda"] = mix.region.lambda;
      s["mix_op"] = std::string(to_string(mix.op));
      s["scar"] = mix.scar;
      if (mix.fractal_index) s["fractal"] = *mix.fractal_index;
      if (mix.partner_op) s["partner_op"] = op_to_json(*mix.partner_op);
      s["mask_seed"] = mix.mask_seed;
      steps.push_back(std::move(s));
    }
    json c;
    c["method"] = chain.method ? json(std::string(to_string(*chain.method))) : json(nullptr);
    c["steps"] = std::move(steps);
    chains.push_back(std::move(c));
  }
  return {{"framework", std::string(to_string(trace.framework))},
          {"w", trace.w},
          {"m", trace.m},
          {"chains", std::move(chains)}};
}

AugmentTrace trace_from_json(const json& j) {
  AugmentTrace trace;
  trace.framework = framework_from_string(j.at("framework").get<std::string>());
  trace.w = j.at("w").get<std::vector<double>>();
  trace.m = j.at("m").get<double>();
  for (const auto& c : j.at("chains")) {
    ChainTrace chain;
    if (!c.at("method").is_null()) chain.method = method_from_string(c.at("method").get<std::string>());
    for (const auto& s : c.at("steps")) {
      if (s.at("type") == "image") {
        chain.steps.emplace_back(op_from_json(s));
        continue;
      }
      MixStep mix;
      const auto r = s.at("region").get<std::vector<int>>();
      if (r.size() != 4) throw ConfigError("trace region must have 4 entries");
      mix.region = {r[0], r[1], r[2], r[3], s.at("lambda").get<double>()};
      mix.op = mix_kind_from_string(s.at("mix_op").get<std::string>());
      mix.scar = s.at("scar").get<bool>();
      if (s.contains("fractal")) mix.fractal_index = s.at("fractal").get<std::size_t>();
      if (s.contains("partner_op")) mix.partner_op = op_from_json(s.at("partner_op"));
      mix.mask_seed = s.at("mask_seed").get<std::uint64_t>();
      chain.steps.emplace_back(mix);
    }
    trace.chains.push_back(std::move(chain));
  }
  if (trace.w.size() != trace.chains.size()) {
    throw ConfigError("trace has " + std::to_string(trace.w.size()) + " weights for " +
                      std::to_string(trace.chains.size()) + " chains");
  }
  return trace;
}

std::string trace_hash(const AugmentTrace& trace) { return sha256_hex(to_json(trace).dump()); }

Augmenter::Augmenter(std::shared_ptr<const MixingSet> set, AugmentConfig cfg)
    : set_(std::move(set)), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (set_ == nullptr || set_->empty()) throw ConfigError("mixing set is empty");
}

const ImageBuffer& Augmenter::partner_image(std::size_t index, Dims dims) const {
  const ImageBuffer& original = set_->image(index);
  if (original.dims() == dims) return original;
  std::shared_ptr<const MixingSet> resized;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto& slot = resized_[{dims.height, dims.width}];
    if (slot == nullptr) slot = std::make_shared<const MixingSet>(set_->resized(dims));
    resized = slot;
  }
  // Cache entries are never evicted, so the reference outlives the lock.
  return resized->image(index);
}

Method Augmenter::draw_method(SeededRng& rng) const {
  const Method drawn = rng.bernoulli(0.5) ? Method::kPLevel : Method::kImageLevel;
  return cfg_.force_method.value_or(drawn);
}

MixStep Augmenter::plan_mix_step(Dims dims, SeededRng& rng) const {
  MixStep step;
  step.region = sample_square_region(dims, cfg_.patch_sizes, cfg_.alpha, rng);
  if (cfg_.scar_enabled && !step.region.covers(dims) && std::min(dims.height, dims.width) >= 8 &&
      rng.bernoulli(0.5)) {
    step.region = sample_scar_region(dims, cfg_.alpha, rng);
    step.scar = true;
  }
  step.op = choose_uniform(cfg_.mix_ops, rng);
  if (rng.uniform() < cfg_.fractal_prob) {
    step.fractal_index = rng.uniform_index(set_->size());
  } else {
    step.partner_op = sample_op(rng, cfg_.op_bank);
  }
  step.mask_seed = rng.next_u64();
  return step;
}

TraceStep Augmenter::plan_step(Method method, Dims dims, SeededRng& rng) const {
  if (method == Method::kPLevel) return plan_mix_step(dims, rng);
  return sample_op(rng, cfg_.op_bank);
}

AugmentTrace Augmenter::plan(Dims dims, SeededRng& rng) const {
  return plan(dims, cfg_.framework, rng);
}

AugmentTrace Augmenter::plan(Dims dims, Framework framework, SeededRng& rng) const {
  AugmentTrace trace;
  trace.framework = framework;
  const int k = framework == Framework::kMixedInput ? 1 : cfg_.k;
  trace.w = sample_dirichlet(cfg_.alpha, static_cast<std::size_t>(k), rng).w;
  trace.m = sample_beta(cfg_.alpha, rng).m;

  switch (framework) {
    case Framework::kChainMixed:
      for (int i = 0; i < k; ++i) {
        ChainTrace chain;
        chain.method = draw_method(rng);
        const int depth = rng.uniform_int(1, cfg_.t);
        for (int j = 0; j < depth; ++j) chain.steps.push_back(plan_step(*chain.method, dims, rng));
        trace.chains.push_back(std::move(chain));
      }
      break;
    case Framework::kLinearMix: {
      const int p_chains = (k + 1) / 2;
      for (int i = 0; i < k; ++i) {
        ChainTrace chain;
        chain.method = i < p_chains ? Method::kPLevel : Method::kImageLevel;
        const int depth = rng.uniform_int(1, cfg_.t);
        for (int j = 0; j < depth; ++j) chain.steps.push_back(plan_step(*chain.method, dims, rng));
        trace.chains.push_back(std::move(chain));
      }
      break;
    }
    case Framework::kMixedInput: {
      ChainTrace chain;
      const int depth = rng.uniform_int(1, cfg_.t);
      for (int j = 0; j < depth; ++j) {
        const Method method = draw_method(rng);
        chain.steps.push_back(plan_step(method, dims, rng));
      }
      trace.chains.push_back(std::move(chain));
      break;
    }
  }
  return trace;
}

ImageBuffer Augmenter::execute(const ImageBuffer& x, const AugmentTrace& trace) const {
  if (trace.w.size() != trace.chains.size()) throw ParameterError("trace weight/chain mismatch");
  if (!(trace.m >= 0.0 && trace.m <= 1.0)) throw ParameterError("trace m outside [0,1]");
  const Dims dims = x.dims();
  std::vector<double> mix(x.size(), 0.0);

  for (std::size_t i = 0; i < trace.chains.size(); ++i) {
    ImageBuffer chain_img = x;
    for (const auto& step : trace.chains[i].steps) {
      if (const auto* op = std::get_if<OpDraw>(&step)) {
        chain_img = apply_op(chain_img, *op);
        continue;
      }
      const auto& mix_step = std::get<MixStep>(step);
      SeededRng mask_rng(mix_step.mask_seed);
      if (mix_step.fractal_index) {
        if (*mix_step.fractal_index >= set_->size()) {
          throw ParameterError("trace references mixing image " +
                               std::to_string(*mix_step.fractal_index) + " of " +
                               std::to_string(set_->size()));
        }
        chain_img = mix_in_region(chain_img, partner_image(*mix_step.fractal_index, dims),
                                  mix_step.region, mix_step.op, mask_rng);
      } else if (mix_step.partner_op) {
        chain_img = mix_in_region(chain_img, apply_op(x, *mix_step.partner_op), mix_step.region,
                                  mix_step.op, mask_rng);
      } else {
        throw ParameterError("mix step has no partner");
      }
    }
    const double w = trace.w[i];
    const auto src = chain_img.data();
    for (std::size_t p = 0; p < mix.size(); ++p) mix[p] += w * src[p];
  }

  ImageBuffer out = x;
  auto dst = out.mutable_data();
  const auto orig = x.data();
  const double m = trace.m;
  for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = m * mix[p] + (1.0 - m) * orig[p];
  clamp_unit(dst);
  return out;
}

AugmentResult Augmenter::augment(const ImageBuffer& x, SeededRng& rng) const {
  return augment(x, cfg_.framework, rng);
}

AugmentResult Augmenter::augment(const ImageBuffer& x, Framework framework, SeededRng& rng) const {
  AugmentTrace trace = plan(x.dims(), framework, rng);
  ImageBuffer image = execute(x, trace);
  return {std::move(image), std::move(trace)};
}

std::vector<ImageBuffer> Augmenter::augment_batch(std::span<const ImageBuffer> xs,
                                                  std::uint64_t run_seed, int workers,
                                                  std::vector<AugmentTrace>* traces) const {
  if (xs.empty()) throw ParameterError("augment_batch: empty batch");
  std::vector<ImageBuffer> out(xs.size());
  if (traces != nullptr) traces->assign(xs.size(), AugmentTrace{});
  parallel_for(xs.size(), workers, [&](std::size_t i) {
    SeededRng rng = SeededRng::child(run_seed, i);
    AugmentResult r = augment(xs[i], rng);
    out[i] = std::move(r.image);
    if (traces != nullptr) (*traces)[i] = std::move(r.trace);
  });
  return out;
}

namespace {

// Non-owning handle; the caller keeps `set` alive for the call.
std::shared_ptr<const MixingSet> borrow(const MixingSet& set) {
  return {std::shared_ptr<const MixingSet>(), &set};
}

}  // namespace

AugmentResult ipmix_augment(const ImageBuffer& x, const MixingSet& set,
                            const AugmentConfig& cfg, SeededRng& rng) {
  return Augmenter(borrow(set), cfg).augment(x, Framework::kChainMixed, rng);
}

AugmentResult linear_mix_augment(const ImageBuffer& x, const MixingSet& set,
                                 const AugmentConfig& cfg, SeededRng& rng) {
  return Augmenter(borrow(set), cfg).augment(x, Framework::kLinearMix, rng);
}

AugmentResult mixed_input_augment(const ImageBuffer& x, const MixingSet& set,
                                  const AugmentConfig& cfg, SeededRng& rng) {
  return Augmenter(borrow(set), cfg).augment(x, Framework::kMixedInput, rng);
}

std::vector<ImageBuffer> augment_batch(std::span<const ImageBuffer> xs, const MixingSet& set,
                                       const AugmentConfig& cfg, std::uint64_t run_seed,
                                       int workers) {
  return Augmenter(borrow(set), cfg).augment_batch(xs, run_seed, workers);
}

}  // namespace ipmix
