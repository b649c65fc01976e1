// Copyright 2026 The DualForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "json.hpp"

namespace dualforge::jsonl {

// Calls `fn(line_number, value)` for every line. Parse failures and any
// DataError thrown by `fn` are rethrown as DataError prefixed with
// "<path>:<line>: ".
void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(std::size_t, const nlohmann::json&)>& fn);

// Compact, key-sorted, UTF-8 preserving; identical values give identical
// bytes.
std::string Dump(const nlohmann::json& value);

class Writer {
 public:
  enum class Mode { kTruncate, kAppend };

  explicit Writer(const std::filesystem::path& path, Mode mode = Mode::kTruncate);
  void Write(const nlohmann::json& value);
  void Flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace dualforge::jsonl
