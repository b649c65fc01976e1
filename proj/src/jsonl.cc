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

#include "dualforge/jsonl.h"

#include "dualforge/error.h"

namespace dualforge::jsonl {

void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + "malformed JSON line (" + e.what() + ")");
    }
    try {
      fn(line_no, value);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    }
  }
}

std::string Dump(const nlohmann::json& value) {
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

Writer::Writer(const std::filesystem::path& path, Mode mode) : path_(path) {
  auto flags = std::ios::binary | (mode == Mode::kAppend ? std::ios::app : std::ios::trunc);
  out_.open(path, flags);
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
}

void Writer::Write(const nlohmann::json& value) {
  out_ << Dump(value) << '\n';
  if (!out_) throw Error("write failed: " + path_.string());
}

void Writer::Flush() {
  out_.flush();
  if (!out_) throw Error("write failed: " + path_.string());
}

}  // namespace dualforge::jsonl
