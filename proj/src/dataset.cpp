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

#include "ipmix/dataset.hpp"

#include <algorithm>
#include <cctype>

#include "ipmix/errors.hpp"

namespace ipmix {
namespace fs = std::filesystem;

namespace {

bool matches(const fs::path& path, const std::vector<std::string>& extensions) {
  if (extensions.empty()) return true;
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return std::find(extensions.begin(), extensions.end(), ext) != extensions.end();
}

}  // namespace

std::vector<fs::path> enumerate(const DatasetSource& src) {
  std::error_code ec;
  if (!fs::is_directory(src.root, ec)) {
    throw IoError("dataset root is not a directory: " + src.root.string());
  }
  std::vector<fs::path> out;
  auto consider = [&](const fs::directory_entry& entry) {
    if (entry.is_regular_file() && matches(entry.path(), src.extensions)) {
      out.push_back(entry.path());
    }
  };
  if (src.recursive) {
    for (const auto& entry : fs::recursive_directory_iterator(src.root)) consider(entry);
  } else {
    for (const auto& entry : fs::directory_iterator(src.root)) consider(entry);
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  return out;
}

}  // namespace ipmix
