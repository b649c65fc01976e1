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

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dualforge/corpus.h"

namespace dualforge {

inline constexpr std::string_view kDefaultClosestOptionTemplate =
    "Please find the closest option to {answer}. The options are {options}.";

// Relative tolerance for numeric answer equality.
inline constexpr double kAnswerTolerance = 1e-6;

// A normalized answer: a number, or lower-cased whitespace-collapsed text.
class CanonicalAnswer {
 public:
  explicit CanonicalAnswer(double number) : value_(number) {}
  explicit CanonicalAnswer(std::string text) : value_(std::move(text)) {}

  bool is_number() const { return std::holds_alternative<double>(value_); }
  double number() const { return std::get<double>(value_); }
  const std::string& text() const { return std::get<std::string>(value_); }

  // Renders so that NormalizeAnswer(ToString()) reproduces this value.
  std::string ToString() const;

 private:
  std::variant<double, std::string> value_;
};

// Strips currency symbols, thousands separators, a trailing '%', and
// "$...$" / "\boxed{...}" wrappers; "a/b" and "\frac{a}{b}" parse as
// rationals. Idempotent through ToString().
CanonicalAnswer NormalizeAnswer(std::string_view raw);

// Numbers: |a - gold| <= 1e-6 * max(1, |gold|). Text: exact after
// normalization. Mixed kinds never match.
bool AnswersEqual(const CanonicalAnswer& predicted, const CanonicalAnswer& gold);
bool AnswersEqual(std::string_view predicted, std::string_view gold);

// Position just past the last answer marker ("The answer is", "answer is",
// "####"), if any.
std::optional<std::size_t> FindLastAnswerMarker(std::string_view text);

// Text after the last answer marker (to end of line, terminal punctuation
// removed); without a marker, the last standalone number.
std::optional<std::string> ExtractAnswer(std::string_view cot);

// Content of the last fenced code block, otherwise the generation from the
// first line that looks like code (contains '=' or '('). nullopt when there
// is nothing program-like.
std::optional<std::string> ExtractProgram(std::string_view generation);

// First uppercase letter A-E that is one of `labels` and is bounded by
// non-alphanumerics.
std::optional<char> FindOptionLetter(std::string_view text, std::string_view labels);

struct ClosestChoice {
  char label = 'A';
  bool numeric = false;
  // The closest-option prompt, rendered for the trace.
  std::string prompt;
};

std::string RenderOptions(const std::vector<OptionChoice>& options);

// Numeric distance when the answer and at least one option are numeric,
// otherwise normalized LCS similarity. Ties go to the earliest label.
// Requires non-empty options.
ClosestChoice ClosestOption(const CanonicalAnswer& answer,
                            const std::vector<OptionChoice>& options,
                            std::string_view prompt_template = kDefaultClosestOptionTemplate);

// Longest common subsequence length over bytes.
std::size_t LcsLength(std::string_view a, std::string_view b);

}  // namespace dualforge
