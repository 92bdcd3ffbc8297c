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

#include <filesystem>
#include <string>
#include <vector>

namespace ipmix {

struct DatasetSource {
  std::filesystem::path root;
  bool recursive = false;
  // Lowercase extensions including the dot. Matching is case-insensitive.
  std::vector<std::string> extensions{".png", ".jpg", ".jpeg"};
};

// Regular files under root with a matching extension, sorted
// lexicographically by their generic path string. Throws IoError when root is
// missing or not a directory.
std::vector<std::filesystem::path> enumerate(const DatasetSource& src);

}  // namespace ipmix
