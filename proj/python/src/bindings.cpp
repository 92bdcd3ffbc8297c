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

// Python bindings: augment_batch and build_mixing_set over numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ipmix/codec.hpp"
#include "ipmix/config.hpp"
#include "ipmix/errors.hpp"
#include "ipmix/fractal.hpp"
#include "ipmix/pipeline.hpp"
#include "ipmix/util.hpp"

namespace py = pybind11;

namespace ipmix {
namespace {

using SetPtr = std::shared_ptr<MixingSet>;

// Config values arrive as Python objects; lists become comma-separated text
// so every key parses exactly as it would from a config file.
std::string config_text(const py::handle& value) {
  if (py::isinstance<py::bool_>(value)) return value.cast<bool>() ? "true" : "false";
  if (py::isinstance<py::str>(value)) return value.cast<std::string>();
  if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ',';
      joined += config_text(item);
    }
    return joined;
  }
  return py::str(value).cast<std::string>();
}

AugmentConfig config_from_kwargs(const py::kwargs& kwargs) {
  KeyValues kv;
  for (const auto& [key, value] : kwargs) kv[key.cast<std::string>()] = config_text(value);
  RunConfig run;
  apply_key_values(kv, run);
  run.augment.validate();
  return run.augment;
}

void check_shape(const py::buffer_info& info) {
  if (info.ndim != 4 || info.shape[3] != 3) {
    throw py::value_error("batch must have shape (N, H, W, 3)");
  }
  if (info.shape[0] < 1 || info.shape[1] < 1 || info.shape[2] < 1) {
    throw py::value_error("batch dimensions must be positive");
  }
}

template <typename T, typename Decode>
std::vector<ImageBuffer> to_images(const py::array_t<T, py::array::c_style | py::array::forcecast>& a,
                                   Decode&& decode) {
  const auto info = a.request();
  check_shape(info);
  const int h = static_cast<int>(info.shape[1]);
  const int w = static_cast<int>(info.shape[2]);
  const std::size_t per = static_cast<std::size_t>(h) * w * 3;
  const T* src = a.data();
  std::vector<ImageBuffer> out;
  out.reserve(static_cast<std::size_t>(info.shape[0]));
  for (py::ssize_t n = 0; n < info.shape[0]; ++n) {
    std::vector<double> data(per);
    for (std::size_t i = 0; i < per; ++i) data[i] = decode(src[n * per + i]);
    out.emplace_back(h, w, std::move(data));
  }
  return out;
}

py::array augment_batch_py(const py::array& batch, const SetPtr& set, std::uint64_t seed,
                           std::optional<int> workers, const py::kwargs& kwargs) {
  const Augmenter augmenter(set, config_from_kwargs(kwargs));
  const int n_workers = workers.value_or(default_workers());
  const bool is_u8 = py::isinstance<py::array_t<std::uint8_t>>(batch);
  if (!is_u8 && !py::isinstance<py::array_t<double>>(batch)) {
    throw py::type_error("batch dtype must be uint8 or float64");
  }

  std::vector<ImageBuffer> images;
  if (is_u8) {
    images = to_images<std::uint8_t>(batch, [](std::uint8_t v) { return v / 255.0; });
  } else {
    images = to_images<double>(batch, [](double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw py::value_error("float64 batch values must lie in [0, 1]");
      return v;
    });
  }

  std::vector<ImageBuffer> out;
  {
    py::gil_scoped_release release;
    out = augmenter.augment_batch(images, seed, n_workers);
  }

  const auto& first = out.front();
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(out.size()), first.height(),
                                       first.width(), 3};
  const std::size_t per = first.size();
  if (is_u8) {
    py::array_t<std::uint8_t> result(shape);
    std::uint8_t* dst = result.mutable_data();
    for (std::size_t n = 0; n < out.size(); ++n) {
      const auto src = out[n].data();
      for (std::size_t i = 0; i < per; ++i) dst[n * per + i] = quantize(src[i]);
    }
    return result;
  }
  py::array_t<double> result(shape);
  double* dst = result.mutable_data();
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::memcpy(dst + n * per, out[n].data().data(), per * sizeof(double));
  }
  return result;
}

SetPtr build_mixing_set_py(std::size_t n_escape, std::size_t n_ifs, std::pair<int, int> size,
                           std::uint64_t seed, std::optional<std::filesystem::path> external_dir,
                           std::optional<int> workers) {
  MixingSetOptions opts;
  opts.n_escape = n_escape;
  opts.n_ifs = n_ifs;
  opts.size = {size.first, size.second};
  opts.external_dir = std::move(external_dir);
  opts.workers = workers.value_or(default_workers());
  std::vector<std::string> warnings;
  SetPtr set;
  {
    py::gil_scoped_release release;
    SeededRng rng(seed);
    set = std::make_shared<MixingSet>(build_mixing_set(opts, rng, &warnings));
  }
  for (const auto& w : warnings) PyErr_WarnEx(PyExc_RuntimeWarning, w.c_str(), 1);
  return set;
}

SetPtr load_mixing_set_py(const std::filesystem::path& dir) {
  std::vector<std::string> warnings;
  auto set = std::make_shared<MixingSet>(load_mixing_set(dir, &warnings));
  for (const auto& w : warnings) PyErr_WarnEx(PyExc_RuntimeWarning, w.c_str(), 1);
  if (set->empty()) throw ConfigError("no images in " + dir.string());
  return set;
}

py::array_t<double> entry_image(const MixingSet& set, std::size_t i) {
  const ImageBuffer& img = set.image(i);
  py::array_t<double> out({img.height(), img.width(), 3});
  std::memcpy(out.mutable_data(), img.data().data(), img.size() * sizeof(double));
  return out;
}

}  // namespace
}  // namespace ipmix

PYBIND11_MODULE(_ipmix, m) {
  using namespace ipmix;
  m.doc() = "IPMix fractal-mixing augmentation";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<MixingSet, SetPtr>(m, "MixingSet")
      .def("__len__", &MixingSet::size)
      .def("image", &entry_image, py::arg("index"), "Entry image as an H x W x 3 float64 array.")
      .def("source", [](const MixingSet& s, std::size_t i) { return to_string(s.entry(i).source); })
      .def("spec_hash", [](const MixingSet& s, std::size_t i) { return s.entry(i).spec_hash; });

  m.def("build_mixing_set", &build_mixing_set_py, py::arg("n_escape") = 100,
        py::arg("n_ifs") = 100, py::arg("size") = std::pair<int, int>{224, 224},
        py::arg("seed") = 0, py::arg("external_dir") = py::none(), py::arg("workers") = py::none(),
        "Render a fractal mixing set (same seeding as `ipmix fractal-gen`).");
  m.def("load_mixing_set", &load_mixing_set_py, py::arg("directory"),
        "Load every PNG/JPEG in a directory, e.g. the output of `ipmix fractal-gen`.");
  m.def("augment_batch", &augment_batch_py, py::arg("batch"), py::arg("mixing_set"),
        py::arg("seed") = 0, py::arg("workers") = py::none(),
        "Augment an (N, H, W, 3) uint8 or float64 batch. Image i uses the same\n"
        "stream as item i of `ipmix augment --seed SEED`. Extra keyword arguments\n"
        "are config keys (k, t, alpha, framework, mix_ops, ...). The GIL is\n"
        "released while augmenting.");
}
