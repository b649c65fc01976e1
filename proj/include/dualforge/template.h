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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dualforge {

// A prompt template with "{name}" placeholders. Substitution is a single
// pass, so placeholder-like text inside substituted values is left alone.
// Braces that do not form a known placeholder are literal text.
class PromptTemplate {
 public:
  PromptTemplate(std::string source, std::vector<std::string> placeholders);

  const std::string& source() const { return source_; }
  bool Has(std::string_view name) const;
  // True when the template ends with "{name}" and nothing after it.
  bool EndsWith(std::string_view name) const;

  std::string Render(const std::map<std::string, std::string, std::less<>>& values) const;

 private:
  struct Piece {
    bool is_slot = false;
    std::string value;  // literal text or placeholder name
  };

  std::string source_;
  std::vector<Piece> pieces_;
};

}  // namespace dualforge
