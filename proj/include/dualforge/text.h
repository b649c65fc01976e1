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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualforge::text {

// ASCII-only classification; locale never consulted.
constexpr bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
constexpr bool IsDigit(char c) { return c >= '0' && c <= '9'; }
constexpr bool IsAlpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
constexpr bool IsAlnum(char c) { return IsDigit(c) || IsAlpha(c); }
constexpr char ToLower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string_view Trim(std::string_view s);
bool IsBlank(std::string_view s);
std::string Lower(std::string_view s);
// Trim, then replace every run of whitespace with one space.
std::string CollapseWhitespace(std::string_view s);

std::size_t CountOccurrences(std::string_view haystack, std::string_view needle);
std::string ReplaceAll(std::string_view s, std::string_view from,
                       std::string_view to);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Unicode scalar values in a UTF-8 string (continuation bytes skipped).
std::size_t ScalarLength(std::string_view utf8);
// Byte offset of the scalar with index `scalar_offset`.
std::size_t ScalarToByteOffset(std::string_view utf8, std::size_t scalar_offset);
bool IsValidUtf8(std::string_view s);

// Locale-independent decimal parse of the whole string ("-12", "3.50", ".5").
// No exponents, no leading '+' other than one optional sign.
std::optional<double> ParseDecimal(std::string_view s);
// Shortest representation that round-trips through ParseDecimal.
std::string FormatNumber(double v);

}  // namespace dualforge::text
