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

// ipmix: command-line front end.
//
//   ipmix fractal-gen --n-escape N --n-ifs M --size HxW --out DIR --seed S [--external DIR]
//   ipmix augment --in DIR --out DIR [--config FILE] [--k 3 --t 3 ...]
//   ipmix preview --in IMAGE --out FILE.png (--grid RxC | --op NAME --strength S)
//   ipmix metrics --kind {clean,mce,rms,mfr,aupr} --log FILE [--baseline FILE]
//   ipmix bench --in DIR [--workers N] [--duration SEC] [--seed S]
//
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 config.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ipmix/bench.hpp"
#include "ipmix/codec.hpp"
#include "ipmix/config.hpp"
#include "ipmix/dataset.hpp"
#include "ipmix/errors.hpp"
#include "ipmix/fractal.hpp"
#include "ipmix/image_ops.hpp"
#include "ipmix/metrics.hpp"
#include "ipmix/pipeline.hpp"
#include "ipmix/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ipmix {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

// Generated mixing sets are rendered at this size; the augmenter resizes
// partners to each input's dimensions.
constexpr Dims kMixingSize{224, 224};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Dims parse_dims(const std::string& text, const char* flag) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError(std::string(flag) + " expects RxC, got " + text);
  try {
    const int a = parse_int(flag, text.substr(0, x));
    const int b = parse_int(flag, text.substr(x + 1));
    if (a < 1 || b < 1) throw UsageError(std::string(flag) + " must be positive");
    return {a, b};
  } catch (const ConfigError&) {
    throw UsageError(std::string(flag) + " expects RxC, got " + text);
  }
}

void write_jsonl(const fs::path& path, const std::vector<json>& lines) {
  std::ostringstream out;
  for (const auto& line : lines) out << line.dump() << '\n';
  const std::string text = out.str();
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string mixing_set_hash(const MixingSet& set) {
  std::string joined;
  for (const auto& e : set.entries()) joined += e.spec_hash + '\n';
  return sha256_hex(joined);
}

// Options shared by augment, preview and bench. Each flag --foo-bar mirrors
// the config key foo_bar; flags are applied on top of the config file.
struct RunFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_file, "key = value config file");
    for (const char* key : {"k", "t", "alpha", "framework", "patch_sizes", "scar_enabled",
                            "mix_ops", "op_bank", "fractal_prob", "force_method", "seed",
                            "workers", "fractals", "n_escape", "n_ifs", "suffix"}) {
      std::string flag = std::string("--") + key;
      for (char& ch : flag) {
        if (ch == '_') ch = '-';
      }
      app.add_option(flag, values[key], std::string("config key ") + key);
    }
  }

  RunConfig resolve(const CLI::App& app) const {
    KeyValues kv;
    if (!config_file.empty()) kv = read_key_values(config_file);
    for (const auto& [key, value] : values) {
      std::string flag = "--" + key;
      for (char& ch : flag) {
        if (ch == '_') ch = '-';
      }
      if (app.count(flag) > 0) kv[key] = value;
    }
    RunConfig cfg;
    if (kv.count("workers") == 0) cfg.workers = default_workers();
    apply_key_values(kv, cfg);
    cfg.augment.validate();
    return cfg;
  }
};

std::shared_ptr<const MixingSet> mixing_set_for(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  std::shared_ptr<const MixingSet> set;
  if (cfg.fractals) {
    set = std::make_shared<MixingSet>(load_mixing_set(*cfg.fractals, &warnings));
  } else {
    MixingSetOptions opts;
    opts.n_escape = cfg.n_escape;
    opts.n_ifs = cfg.n_ifs;
    opts.size = kMixingSize;
    opts.workers = cfg.workers;
    // The mixing set has its own stream so it does not shift per-image seeds.
    SeededRng rng = SeededRng::child(cfg.seed, static_cast<std::size_t>(-1));
    set = std::make_shared<MixingSet>(build_mixing_set(opts, rng, &warnings));
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (set->empty()) throw ConfigError("mixing set is empty");
  return set;
}

int run_fractal_gen(std::size_t n_escape, std::size_t n_ifs, const std::string& size,
                    const fs::path& out, std::uint64_t seed, const std::string& external,
                    int workers) {
  MixingSetOptions opts;
  opts.n_escape = n_escape;
  opts.n_ifs = n_ifs;
  opts.size = parse_dims(size, "--size");
  opts.workers = workers;
  if (!external.empty()) opts.external_dir = external;
  SeededRng rng(seed);
  std::vector<std::string> warnings;
  const MixingSet set = build_mixing_set(opts, rng, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  fs::create_directories(out);
  std::vector<json> manifest(set.size());
  parallel_for(set.size(), workers, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.png", i);
    const auto& e = set.entry(i);
    save_png(out / name, e.image);
    manifest[i] = {{"path", name}, {"source", to_string(e.source)}, {"spec_hash", e.spec_hash}};
    if (!e.origin.empty()) manifest[i]["origin"] = e.origin;
  });
  write_jsonl(out / "manifest.jsonl", manifest);
  std::cout << "wrote " << set.size() << " images to " << out.string() << '\n';
  return 0;
}

int run_augment(const fs::path& in, const fs::path& out, const RunConfig& cfg) {
  DatasetSource src{in};
  src.recursive = true;
  const auto paths = enumerate(src);
  if (paths.empty()) throw IoError("no images under " + in.string());
  const Augmenter augmenter(mixing_set_for(cfg), cfg.augment);

  std::vector<json> lines(paths.size() + 1);
  lines[0] = {{"config", to_json(cfg)},
              {"config_hash", config_hash(cfg.augment)},
              {"mixing_set_hash", mixing_set_hash(augmenter.mixing_set())},
              {"images", paths.size()}};
  parallel_for(paths.size(), cfg.workers, [&](std::size_t i) {
    const fs::path rel = paths[i].lexically_relative(in);
    fs::path target = out / rel.parent_path() / (rel.stem().string() + cfg.suffix + ".png");
    SeededRng rng = SeededRng::child(cfg.seed, i);
    const auto result = augmenter.augment(load_image(paths[i]), rng);
    const Bytes png = encode_png(result.image);
    write_file(target, png);
    lines[i + 1] = {{"input", rel.generic_string()},
                    {"output", target.lexically_relative(out).generic_string()},
                    {"seed_index", i},
                    {"trace_hash", trace_hash(result.trace)},
                    {"output_sha256", sha256_hex(png)}};
  });
  // Written in input order once every item is done, whatever the completion order.
  write_jsonl(out / "manifest.jsonl", lines);
  std::cout << "augmented " << paths.size() << " images into " << out.string() << '\n';
  return 0;
}

int run_preview(const fs::path& in, const fs::path& out, const std::string& grid,
                const std::string& op_name, std::optional<double> strength, const RunConfig& cfg) {
  const ImageBuffer x = load_image(in);
  if (!op_name.empty()) {
    const ImageOp op = image_op_from_string(op_name);
    const auto& info = op_info(op);
    const double s = strength.value_or(info.identity.value_or(info.lo));
    save_png(out, apply_op(x, {op, s}));
    return 0;
  }
  const Dims cells = parse_dims(grid, "--grid");
  const Augmenter augmenter(mixing_set_for(cfg), cfg.augment);
  const std::size_t n = static_cast<std::size_t>(cells.height) * cells.width;
  std::vector<ImageBuffer> tiles(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    SeededRng rng = SeededRng::child(cfg.seed, i);
    tiles[i] = augmenter.augment(x, rng).image;
  });
  ImageBuffer sheet(cells.height * x.height(), cells.width * x.width());
  for (std::size_t i = 0; i < n; ++i) {
    const int oy = static_cast<int>(i) / cells.width * x.height();
    const int ox = static_cast<int>(i) % cells.width * x.width();
    for (int y = 0; y < x.height(); ++y) {
      for (int xx = 0; xx < x.width(); ++xx) {
        for (int c = 0; c < ImageBuffer::kChannels; ++c) {
          sheet.at(oy + y, ox + xx, c) = tiles[i].at(y, xx, c);
        }
      }
    }
  }
  save_png(out, sheet);
  return 0;
}

template <typename Parse>
auto read_csv(const std::string& path, Parse&& parse) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse(in);
}

int run_metrics(const std::string& kind, const std::string& log_path,
                const std::string& baseline_path) {
  const PredictionLog log = read_prediction_log(log_path);
  json out{{"metric", kind}};
  auto need_baseline = [&] {
    if (baseline_path.empty()) throw UsageError("--kind " + kind + " requires --baseline");
  };
  if (kind == "clean") {
    out["value"] = clean_error(log);
  } else if (kind == "rms") {
    out["value"] = rms_calibration(log);
  } else if (kind == "aupr") {
    out["value"] = aupr(log);
  } else if (kind == "mce") {
    need_baseline();
    const auto r = mce(log, read_csv(baseline_path, [](std::istream& s) {
                         return parse_baseline_errors(s);
                       }));
    out["value"] = r.value;
    out["groups"] = r.groups;
  } else if (kind == "mfr") {
    need_baseline();
    const auto r = mfr(log, read_csv(baseline_path, [](std::istream& s) {
                         return parse_baseline_flip_rates(s);
                       }));
    out["value"] = r.value;
    out["groups"] = r.groups;
  } else {
    throw UsageError("unknown metric kind: " + kind);
  }
  if (!out.contains("groups")) out["groups"] = json::object();
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_bench_cmd(const fs::path& in, double duration, const RunConfig& cfg) {
  const Augmenter augmenter(mixing_set_for(cfg), cfg.augment);
  const auto report = run_bench(DatasetSource{in}, augmenter, {cfg.workers, duration, cfg.seed});
  std::cout << to_json(report).dump(2) << '\n';
  return 0;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"IPMix fractal-mixing augmentation"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("fractal-gen", "render a fractal mixing set");
  std::size_t n_escape = 100;
  std::size_t n_ifs = 100;
  std::string size = "224x224";
  std::string gen_out;
  std::string external;
  std::uint64_t gen_seed = 0;
  int gen_workers = default_workers();
  gen->add_option("--n-escape", n_escape, "escape-time fractals")->capture_default_str();
  gen->add_option("--n-ifs", n_ifs, "IFS fractals")->capture_default_str();
  gen->add_option("--size", size, "image size HxW")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "run seed")->capture_default_str();
  gen->add_option("--external", external, "directory of extra images");
  gen->add_option("--workers", gen_workers, "worker threads")->check(CLI::PositiveNumber);

  std::string in;
  std::string out;

  auto* augment = app.add_subcommand("augment", "augment a directory tree");
  RunFlags augment_flags;
  augment->add_option("--in", in, "input directory")->required();
  augment->add_option("--out", out, "output directory")->required();
  augment_flags.add_to(*augment);

  auto* preview = app.add_subcommand("preview", "render a sample grid or one op");
  RunFlags preview_flags;
  std::string grid = "4x4";
  std::string op_name;
  std::optional<double> strength;
  preview->add_option("--in", in, "input image")->required();
  preview->add_option("--out", out, "output PNG")->required();
  preview->add_option("--grid", grid, "grid RxC of augmentations")->capture_default_str();
  preview->add_option("--op", op_name, "apply a single image op instead");
  preview->add_option("--strength", strength, "op strength (default: identity)");
  preview_flags.add_to(*preview);

  auto* metrics = app.add_subcommand("metrics", "compute a robustness metric");
  std::string kind;
  std::string log_path;
  std::string baseline_path;
  metrics->add_option("--kind", kind, "metric")
      ->required()
      ->check(CLI::IsMember({"clean", "mce", "rms", "mfr", "aupr"}));
  metrics->add_option("--log", log_path, "prediction CSV")->required();
  metrics->add_option("--baseline", baseline_path, "baseline CSV for mce/mfr");

  auto* bench = app.add_subcommand("bench", "measure throughput against decode+encode");
  RunFlags bench_flags;
  double duration = 2.0;
  bench->add_option("--in", in, "input directory")->required();
  bench->add_option("--duration", duration, "seconds per pipeline")->capture_default_str();
  bench_flags.add_to(*bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*gen) return run_fractal_gen(n_escape, n_ifs, size, gen_out, gen_seed, external, gen_workers);
  if (*augment) return run_augment(in, out, augment_flags.resolve(*augment));
  if (*preview) {
    return run_preview(in, out, grid, op_name, strength,
                       op_name.empty() ? preview_flags.resolve(*preview) : RunConfig{});
  }
  if (*metrics) return run_metrics(kind, log_path, baseline_path);
  if (*bench) return run_bench_cmd(in, duration, bench_flags.resolve(*bench));
  return kExitUsage;
}

// Maps an exception (possibly wrapped by a worker pool) to an exit code.
int report(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const WorkItemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.cause()) {
      try {
        std::rethrow_exception(e.cause());
      } catch (const IoError&) {
        return kExitIo;
      } catch (const ConfigError&) {
        return kExitConfig;
      } catch (const ParameterError&) {
        return kExitConfig;
      } catch (...) {
      }
    }
    return kExitIo;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace
}  // namespace ipmix

int main(int argc, char** argv) {
  try {
    return ipmix::main_impl(argc, argv);
  } catch (...) {
    return ipmix::report(std::current_exception());
  }
}
