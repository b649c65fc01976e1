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
#include <string>
#include <string_view>
#include <vector>

namespace dualforge {

enum class SegmentKind { kCotStep, kPotStatement, kClause, kQuestion };

// Half-open byte range into the UTF-8 source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

struct Segment {
  std::string text;
  Span span;
  bool has_numeral = false;
  SegmentKind kind = SegmentKind::kCotStep;

  bool operator==(const Segment&) const = default;
};

using Segmentation = std::vector<Segment>;

// Steps end at every newline and, within a line, after '.', '!' or '?'
// followed by whitespace. A period between two digits never ends a step.
// Whitespace-only input yields a single whitespace segment with
// has_numeral=false; callers treat it as degenerate.
Segmentation SegmentCotSteps(std::string_view response);

// One segment per non-blank physical line; the segment is the whole line.
Segmentation SegmentPotStatements(std::string_view response);

// Sentences as in SegmentCotSteps (newlines are not boundaries here), then
// commas/semicolons with at least three words on each side. A comma or
// semicolon between two digits never splits ("3,600"). The delimiter
// belongs to the gap. Segments ending in '?' are questions.
Segmentation SegmentInstructionClauses(std::string_view instruction);

// ASCII digit, or one of a closed list of number words at word boundaries
// (case-insensitive).
bool DetectNumerals(std::string_view text);

// Segments interleaved with the gaps between them; equals `source` for every
// segmentation produced above.
std::string Reconstruct(std::string_view source, const Segmentation& segments);

}  // namespace dualforge
