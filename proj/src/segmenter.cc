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

#include "dualforge/segmenter.h"

#include <array>

#include "dualforge/text.h"

namespace dualforge {

namespace {

using text::IsDigit;
using text::IsSpace;

constexpr std::array<std::string_view, 30> kNumberWords = {
    "zero",    "one",     "two",     "three",   "four",    "five",
    "six",     "seven",   "eight",   "nine",    "ten",     "eleven",
    "twelve",  "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
    "eighteen", "nineteen", "twenty",  "thirty",  "forty",   "fifty",
    "sixty",   "seventy", "eighty",  "ninety",  "hundred", "thousand"};
constexpr std::array<std::string_view, 3> kExtraWords = {"million", "half",
                                                         "twice"};

bool IsSentenceEnd(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (c != '.' && c != '!' && c != '?') return false;
  if (c == '.' && i > 0 && i + 1 < s.size() && IsDigit(s[i - 1]) &&
      IsDigit(s[i + 1])) {
    return false;
  }
  return i + 1 < s.size() && IsSpace(s[i + 1]);
}

// Cuts the half-open piece [begin, end) into a trimmed segment, if any.
void EmitPiece(std::string_view s, std::size_t begin, std::size_t end,
               SegmentKind kind, Segmentation& out) {
  while (begin < end && IsSpace(s[begin])) ++begin;
  while (end > begin && IsSpace(s[end - 1])) --end;
  if (begin == end) return;
  Segment seg;
  seg.text = std::string(s.substr(begin, end - begin));
  seg.span = {begin, end};
  seg.has_numeral = DetectNumerals(seg.text);
  seg.kind = kind;
  out.push_back(std::move(seg));
}

Segmentation DegenerateOrResult(std::string_view s, SegmentKind kind,
                                Segmentation out) {
  if (!out.empty()) return out;
  Segment seg;
  seg.text = std::string(s);
  seg.span = {0, s.size()};
  seg.has_numeral = false;
  seg.kind = kind;
  return {seg};
}

std::size_t CountWords(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    if (IsSpace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

bool IsClauseDelimiter(std::string_view s, std::size_t i) {
  if (s[i] != ',' && s[i] != ';') return false;
  return !(i > 0 && i + 1 < s.size() && IsDigit(s[i - 1]) && IsDigit(s[i + 1]));
}

}  // namespace

Segmentation SegmentCotSteps(std::string_view response) {
  Segmentation out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (response[i] == '\n') {
      EmitPiece(response, begin, i, SegmentKind::kCotStep, out);
      begin = i + 1;
    } else if (IsSentenceEnd(response, i)) {
      EmitPiece(response, begin, i + 1, SegmentKind::kCotStep, out);
      begin = i + 1;
    }
  }
  EmitPiece(response, begin, response.size(), SegmentKind::kCotStep, out);
  return DegenerateOrResult(response, SegmentKind::kCotStep, std::move(out));
}

Segmentation SegmentPotStatements(std::string_view response) {
  Segmentation out;
  std::size_t begin = 0;
  while (begin <= response.size()) {
    std::size_t end = response.find('\n', begin);
    if (end == std::string_view::npos) end = response.size();
    std::string_view line = response.substr(begin, end - begin);
    if (!text::IsBlank(line)) {
      Segment seg;
      seg.text = std::string(line);
      seg.span = {begin, end};
      seg.has_numeral = DetectNumerals(line);
      seg.kind = SegmentKind::kPotStatement;
      out.push_back(std::move(seg));
    }
    begin = end + 1;
  }
  return DegenerateOrResult(response, SegmentKind::kPotStatement,
                            std::move(out));
}

Segmentation SegmentInstructionClauses(std::string_view instruction) {
  const std::string_view s = instruction;
  Segmentation out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (IsSentenceEnd(s, i)) {
      EmitPiece(s, begin, i + 1, SegmentKind::kClause, out);
      begin = i + 1;
      continue;
    }
    if (!IsClauseDelimiter(s, i)) continue;
    std::size_t next = i + 1;
    while (next < s.size() && !IsClauseDelimiter(s, next) &&
           !IsSentenceEnd(s, next)) {
      ++next;
    }
    if (next < s.size() && IsSentenceEnd(s, next)) ++next;
    if (CountWords(s.substr(begin, i - begin)) >= 3 &&
        CountWords(s.substr(i + 1, next - i - 1)) >= 3) {
      EmitPiece(s, begin, i, SegmentKind::kClause, out);
      begin = i + 1;
    }
  }
  EmitPiece(s, begin, s.size(), SegmentKind::kClause, out);
  out = DegenerateOrResult(s, SegmentKind::kClause, std::move(out));
  for (auto& seg : out) {
    std::string_view trimmed = text::Trim(seg.text);
    if (!trimmed.empty() && trimmed.back() == '?') seg.kind = SegmentKind::kQuestion;
  }
  return out;
}

bool DetectNumerals(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (IsDigit(s[i])) return true;
    if (!text::IsAlpha(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && text::IsAlpha(s[j])) ++j;
    const std::string word = text::Lower(s.substr(i, j - i));
    for (auto w : kNumberWords) {
      if (word == w) return true;
    }
    for (auto w : kExtraWords) {
      if (word == w) return true;
    }
    i = j;
  }
  return false;
}

std::string Reconstruct(std::string_view source, const Segmentation& segments) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& seg : segments) {
    out.append(source.substr(cursor, seg.span.start - cursor));
    out.append(seg.text);
    cursor = seg.span.end;
  }
  out.append(source.substr(cursor));
  return out;
}

}  // namespace dualforge
