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

#include "dualforge/answer.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "dualforge/error.h"
#include "dualforge/template.h"
#include "dualforge/text.h"

namespace dualforge {

namespace {

using text::IsAlnum;
using text::IsDigit;

// $, euro, pound, yen.
constexpr std::array<std::string_view, 4> kCurrency = {"$", "\xE2\x82\xAC", "\xC2\xA3",
                                                       "\xC2\xA5"};

bool StripWrapper(std::string& s, std::string_view open, std::string_view close) {
  if (s.size() >= open.size() + close.size() && s.starts_with(open) &&
      s.ends_with(close)) {
    s = std::string(text::Trim(s.substr(open.size(), s.size() - open.size() - close.size())));
    return true;
  }
  return false;
}

// "\frac{a}{b}", "\dfrac{a}{b}", "\tfrac{a}{b}" with an optional leading '-'.
std::optional<double> ParseLatexFraction(std::string_view s) {
  bool negative = false;
  if (s.starts_with("-")) {
    negative = true;
    s.remove_prefix(1);
  }
  for (std::string_view head : {"\\frac{", "\\dfrac{", "\\tfrac{"}) {
    if (!s.starts_with(head)) continue;
    s.remove_prefix(head.size());
    const std::size_t mid = s.find("}{");
    if (mid == std::string_view::npos || !s.ends_with("}")) return std::nullopt;
    auto num = text::ParseDecimal(text::Trim(s.substr(0, mid)));
    auto den = text::ParseDecimal(text::Trim(s.substr(mid + 2, s.size() - mid - 3)));
    if (!num || !den || *den == 0) return std::nullopt;
    return (negative ? -1.0 : 1.0) * *num / *den;
  }
  return std::nullopt;
}

std::optional<double> ParseNumeric(std::string s) {
  for (auto sym : kCurrency) s = text::ReplaceAll(s, sym, "");
  s = text::ReplaceAll(s, ",", "");
  s = std::string(text::Trim(s));
  if (s.ends_with("\\%")) s.resize(s.size() - 2);
  if (s.ends_with("%")) s.pop_back();
  s = std::string(text::Trim(s));
  if (s.empty()) return std::nullopt;
  if (auto v = ParseLatexFraction(s)) return v;
  if (const std::size_t slash = s.find('/'); slash != std::string::npos) {
    auto num = text::ParseDecimal(text::Trim(std::string_view(s).substr(0, slash)));
    auto den = text::ParseDecimal(text::Trim(std::string_view(s).substr(slash + 1)));
    if (num && den && *den != 0) return *num / *den;
    return std::nullopt;
  }
  return text::ParseDecimal(s);
}

}  // namespace

std::string CanonicalAnswer::ToString() const {
  if (is_number()) return text::FormatNumber(number());
  return text();
}

CanonicalAnswer NormalizeAnswer(std::string_view raw) {
  std::string s = text::Lower(text::CollapseWhitespace(raw));
  for (bool changed = true; changed;) {
    changed = StripWrapper(s, "\\boxed{", "}") || StripWrapper(s, "$", "$") ||
              StripWrapper(s, "\\(", "\\)") || StripWrapper(s, "\\text{", "}");
  }
  if (auto v = ParseNumeric(s)) {
    // -0 and 0 print alike; keep the canonical form sign-free.
    return CanonicalAnswer(*v == 0 ? 0.0 : *v);
  }
  return CanonicalAnswer(std::move(s));
}

bool AnswersEqual(const CanonicalAnswer& predicted, const CanonicalAnswer& gold) {
  if (predicted.is_number() != gold.is_number()) return false;
  if (predicted.is_number()) {
    const double b = gold.number();
    return std::fabs(predicted.number() - b) <= kAnswerTolerance * std::max(1.0, std::fabs(b));
  }
  return predicted.text() == gold.text();
}

bool AnswersEqual(std::string_view predicted, std::string_view gold) {
  return AnswersEqual(NormalizeAnswer(predicted), NormalizeAnswer(gold));
}

std::optional<std::size_t> FindLastAnswerMarker(std::string_view text) {
  std::optional<std::size_t> best_start;
  std::size_t best_end = 0;
  for (std::string_view marker : {"The answer is", "answer is", "####"}) {
    const std::size_t pos = text.rfind(marker);
    if (pos == std::string_view::npos) continue;
    if (!best_start || pos > *best_start) {
      best_start = pos;
      best_end = pos + marker.size();
    }
  }
  if (!best_start) return std::nullopt;
  return best_end;
}

namespace {

std::optional<std::string> LastStandaloneNumber(std::string_view s) {
  std::optional<std::string> last;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!IsDigit(s[i]) || (i > 0 && (text::IsAlpha(s[i - 1]) || IsDigit(s[i - 1])))) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    if (begin > 0 && s[begin - 1] == '-' && (begin < 2 || !IsAlnum(s[begin - 2]))) --begin;
    std::size_t end = i;
    while (end < s.size()) {
      if (IsDigit(s[end])) {
        ++end;
      } else if ((s[end] == ',' || s[end] == '.' || s[end] == '/') && end + 1 < s.size() &&
                 IsDigit(s[end + 1])) {
        end += 2;
      } else {
        break;
      }
    }
    if (end >= s.size() || !text::IsAlpha(s[end])) {
      last = std::string(s.substr(begin, end - begin));
    }
    i = end;
  }
  return last;
}

}  // namespace

std::optional<std::string> ExtractAnswer(std::string_view cot) {
  if (auto marker_end = FindLastAnswerMarker(cot)) {
    std::string_view tail = cot.substr(*marker_end);
    tail = tail.substr(0, tail.find('\n'));
    tail = text::Trim(tail);
    while (!tail.empty() && (tail.front() == ':' || text::IsSpace(tail.front()))) {
      tail.remove_prefix(1);
    }
    while (!tail.empty() && std::string_view(".,;:!?").find(tail.back()) != std::string_view::npos) {
      tail.remove_suffix(1);
    }
    tail = text::Trim(tail);
    if (!tail.empty()) return std::string(tail);
  }
  return LastStandaloneNumber(cot);
}

std::optional<std::string> ExtractProgram(std::string_view generation) {
  std::vector<std::string_view> lines;
  for (std::size_t begin = 0; begin <= generation.size();) {
    std::size_t end = generation.find('\n', begin);
    if (end == std::string_view::npos) end = generation.size();
    lines.push_back(generation.substr(begin, end - begin));
    begin = end + 1;
  }

  std::optional<std::string> fenced;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!text::Trim(lines[i]).starts_with("```")) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && !text::Trim(lines[j]).starts_with("```")) ++j;
    std::vector<std::string> body(lines.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                  lines.begin() + static_cast<std::ptrdiff_t>(j));
    fenced = text::Join(body, "\n");
    i = j;
  }
  if (fenced) {
    if (text::IsBlank(*fenced)) return std::nullopt;
    return fenced;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find('=') == std::string_view::npos &&
        lines[i].find('(') == std::string_view::npos) {
      continue;
    }
    std::vector<std::string> body(lines.begin() + static_cast<std::ptrdiff_t>(i), lines.end());
    std::string program = text::Join(body, "\n");
    while (!program.empty() && text::IsSpace(program.back())) program.pop_back();
    return program;
  }
  return std::nullopt;
}

std::optional<char> FindOptionLetter(std::string_view s, std::string_view labels) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c < 'A' || c > 'E' || labels.find(c) == std::string_view::npos) continue;
    const bool left_ok = i == 0 || !IsAlnum(s[i - 1]);
    const bool right_ok = i + 1 == s.size() || !IsAlnum(s[i + 1]);
    if (left_ok && right_ok) return c;
  }
  return std::nullopt;
}

std::string RenderOptions(const std::vector<OptionChoice>& options) {
  std::vector<std::string> parts;
  for (const auto& o : options) parts.push_back(std::string(1, o.label) + ") " + o.text);
  return text::Join(parts, ", ");
}

std::size_t LcsLength(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

ClosestChoice ClosestOption(const CanonicalAnswer& answer,
                            const std::vector<OptionChoice>& options,
                            std::string_view prompt_template) {
  if (options.empty()) throw DataError("closest option needs at least one option");
  ClosestChoice choice;
  const PromptTemplate tmpl{std::string(prompt_template), {"answer", "options"}};
  choice.prompt = tmpl.Render({{"answer", answer.ToString()}, {"options", RenderOptions(options)}});

  std::vector<CanonicalAnswer> normalized;
  bool any_numeric = false;
  for (const auto& o : options) {
    normalized.push_back(NormalizeAnswer(o.text));
    any_numeric = any_numeric || normalized.back().is_number();
  }

  std::optional<std::size_t> best;
  if (answer.is_number() && any_numeric) {
    choice.numeric = true;
    double best_dist = 0;
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (!normalized[i].is_number()) continue;
      const double d = std::fabs(answer.number() - normalized[i].number());
      if (!best || d < best_dist || (d == best_dist && options[i].label < options[*best].label)) {
        best = i;
        best_dist = d;
      }
    }
  } else {
    const std::string a = answer.ToString();
    double best_sim = -1;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const std::string b = normalized[i].ToString();
      const std::size_t denom = std::max(a.size(), b.size());
      const double sim =
          denom == 0 ? 1.0 : static_cast<double>(LcsLength(a, b)) / static_cast<double>(denom);
      if (!best || sim > best_sim ||
          (sim == best_sim && options[i].label < options[*best].label)) {
        best = i;
        best_sim = sim;
      }
    }
  }
  choice.label = options[*best].label;
  return choice;
}

}  // namespace dualforge
