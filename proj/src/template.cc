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

#include "dualforge/template.h"

#include <algorithm>

#include "dualforge/error.h"

namespace dualforge {

PromptTemplate::PromptTemplate(std::string source,
                               std::vector<std::string> placeholders)
    : source_(std::move(source)) {
  std::string literal;
  std::size_t i = 0;
  while (i < source_.size()) {
    bool matched = false;
    if (source_[i] == '{') {
      for (const auto& name : placeholders) {
        const std::string token = "{" + name + "}";
        if (source_.compare(i, token.size(), token) == 0) {
          if (!literal.empty()) pieces_.push_back({false, std::move(literal)});
          literal.clear();
          pieces_.push_back({true, name});
          i += token.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) literal.push_back(source_[i++]);
  }
  if (!literal.empty()) pieces_.push_back({false, std::move(literal)});
}

bool PromptTemplate::Has(std::string_view name) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) {
    return p.is_slot && p.value == name;
  });
}

bool PromptTemplate::EndsWith(std::string_view name) const {
  return !pieces_.empty() && pieces_.back().is_slot && pieces_.back().value == name;
}

std::string PromptTemplate::Render(
    const std::map<std::string, std::string, std::less<>>& values) const {
  std::string out;
  for (const auto& p : pieces_) {
    if (!p.is_slot) {
      out += p.value;
      continue;
    }
    auto it = values.find(p.value);
    if (it == values.end()) {
      throw UsageError("no value for template placeholder {" + p.value + "}");
    }
    out += it->second;
  }
  return out;
}

}  // namespace dualforge
