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

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ipmix {

// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// Thrown by parallel_for when a work item fails; carries the item index.
class WorkItemError : public std::runtime_error {
 public:
  WorkItemError(std::size_t index, const std::string& what, std::exception_ptr cause)
      : std::runtime_error("item " + std::to_string(index) + ": " + what),
        index_(index),
        cause_(std::move(cause)) {}
  std::size_t index() const noexcept { return index_; }
  // The original exception, for callers that dispatch on its type.
  const std::exception_ptr& cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

// Runs fn(i) for i in [0, n) on `workers` threads (workers <= 1 runs inline).
// Items are claimed from a shared counter, so fn must not depend on which
// thread runs it. If any item throws, the exception of the lowest failing
// index is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Worker count from IPMIX_WORKERS, else hardware concurrency, else 1.
int default_workers();

}  // namespace ipmix
