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

#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "dualforge/segmenter.h"
#include "dualforge/text.h"

using namespace dualforge;

namespace {

std::vector<std::string> Texts(const Segmentation& segs) {
  std::vector<std::string> out;
  for (const auto& s : segs) out.push_back(s.text);
  return out;
}

bool Ws(char c) { return text::IsSpace(c); }

// Structural invariants every segmentation must satisfy.
void CheckStructure(std::string_view src, const Segmentation& segs) {
  REQUIRE_FALSE(segs.empty());
  std::size_t cursor = 0;
  for (const auto& seg : segs) {
    REQUIRE(seg.span.start >= cursor);
    REQUIRE(seg.span.end <= src.size());
    CHECK(src.substr(seg.span.start, seg.span.size()) == seg.text);
    CHECK(seg.has_numeral == DetectNumerals(seg.text));
    cursor = seg.span.end;
  }
  CHECK(Reconstruct(src, segs) == std::string(src));
}

// Period positions that a brute-force scan says may end a step.
std::vector<std::size_t> BruteForceStepEnds(std::string_view s) {
  std::vector<std::size_t> ends;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool digit_before = i > 0 && s[i - 1] >= '0' && s[i - 1] <= '9';
    const bool digit_after = i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '9';
    if (c == '.' && digit_before && digit_after) continue;
    if (i + 1 < s.size() && Ws(s[i + 1])) ends.push_back(i);
  }
  return ends;
}

// Two-level oracle for CoT steps: split lines, then cut each line after the
// brute-force punctuation positions; trim and drop empties.
std::vector<std::string> OracleSteps(std::string_view s) {
  std::vector<std::string> out;
  auto emit = [&](std::string_view piece) {
    auto t = text::Trim(piece);
    if (!t.empty()) out.emplace_back(t);
  };
  std::size_t line_begin = 0;
  while (line_begin <= s.size()) {
    std::size_t nl = s.find('\n', line_begin);
    if (nl == std::string_view::npos) nl = s.size();
    std::string_view line = s.substr(line_begin, nl - line_begin);
    std::size_t cut = 0;
    for (std::size_t e : BruteForceStepEnds(line)) {
      emit(line.substr(cut, e + 1 - cut));
      cut = e + 1;
    }
    emit(line.substr(cut));
    line_begin = nl + 1;
  }
  if (out.empty()) out.emplace_back(s);
  return out;
}

std::size_t Words(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!Ws(s[i]) && (i == 0 || Ws(s[i - 1]))) ++n;
  }
  return n;
}

// Clause oracle: sentences first (same punctuation rule over the whole
// string), then comma/semicolon cuts decided inside each sentence.
std::vector<std::string> OracleClauses(std::string_view s) {
  std::vector<std::string> out;
  auto emit = [&](std::string_view piece) {
    auto t = text::Trim(piece);
    if (!t.empty()) out.emplace_back(t);
  };
  auto is_delim = [&](std::string_view sent, std::size_t i) {
    if (sent[i] != ',' && sent[i] != ';') return false;
    const bool db = i > 0 && text::IsDigit(sent[i - 1]);
    const bool da = i + 1 < sent.size() && text::IsDigit(sent[i + 1]);
    return !(db && da);
  };
  std::vector<std::string_view> sentences;
  std::size_t begin = 0;
  for (std::size_t e : BruteForceStepEnds(s)) {
    sentences.push_back(s.substr(begin, e + 1 - begin));
    begin = e + 1;
  }
  sentences.push_back(s.substr(begin));
  for (std::string_view sent : sentences) {
    std::vector<std::size_t> delims;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (is_delim(sent, i)) delims.push_back(i);
    }
    std::size_t cut = 0;
    for (std::size_t k = 0; k < delims.size(); ++k) {
      const std::size_t d = delims[k];
      const std::size_t right_end = k + 1 < delims.size() ? delims[k + 1] : sent.size();
      if (Words(sent.substr(cut, d - cut)) >= 3 &&
          Words(sent.substr(d + 1, right_end - d - 1)) >= 3) {
        emit(sent.substr(cut, d - cut));
        cut = d + 1;
      }
    }
    emit(sent.substr(cut));
  }
  if (out.empty()) out.emplace_back(s);
  return out;
}

std::string RandomString(std::mt19937_64& g, const std::vector<std::string>& alphabet,
                         std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len), pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t i = len(g); i > 0; --i) s += alphabet[pick(g)];
  return s;
}

}  // namespace

TEST_CASE("cot steps split at sentence punctuation") {
  auto segs = SegmentCotSteps("He bought 5 apples. He ate 2. The answer is 3.");
  REQUIRE(segs.size() == 3);
  CHECK(Texts(segs) ==
        std::vector<std::string>{"He bought 5 apples.", "He ate 2.", "The answer is 3."});
  for (const auto& s : segs) {
    CHECK(s.has_numeral);
    CHECK(s.kind == SegmentKind::kCotStep);
  }
}

TEST_CASE("decimal period is not a step boundary") {
  const std::string src = "The cost is 3.50 dollars total.";
  CHECK(SegmentCotSteps(src).size() == 1);
  CHECK(BruteForceStepEnds(src).empty());
  CHECK(SegmentCotSteps("Pay 3.5. Then 2.25 more!").size() == 2);
}

TEST_CASE("newline boundary and numeral flags") {
  auto segs = SegmentCotSteps("Step A\nStep B has 4 items");
  REQUIRE(segs.size() == 2);
  CHECK_FALSE(segs[0].has_numeral);
  CHECK(segs[1].has_numeral);
  CHECK(segs[1].span == Span{7, 25});
  // "one" is a number word, so this first step carries a numeral.
  auto words = SegmentCotSteps("Step one\nStep two has 4 items");
  REQUIRE(words.size() == 2);
  CHECK(words[0].has_numeral);
}

TEST_CASE("whitespace-only input is one degenerate segment") {
  auto segs = SegmentCotSteps(" \n ");
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].text == " \n ");
  CHECK_FALSE(segs[0].has_numeral);
  CHECK(text::Trim(segs[0].text).empty());
}

TEST_CASE("pot statements are non-blank lines") {
  CHECK(SegmentPotStatements("x = 5\ny = x * 2\nprint(y)").size() == 3);
  auto blank = SegmentPotStatements("x = 5\n\n   \nprint(x)\n");
  REQUIRE(blank.size() == 2);
  CHECK(blank[1].text == "print(x)");
  CHECK(blank[1].span == Span{11, 19});
  auto one = SegmentPotStatements("print(3/4)");
  REQUIRE(one.size() == 1);
  CHECK(one[0].has_numeral);
  CHECK(one[0].kind == SegmentKind::kPotStatement);
  // Indentation is part of the statement.
  CHECK(SegmentPotStatements("for i in r:\n    t += i")[1].text == "    t += i");
}

TEST_CASE("instruction clauses") {
  auto segs = SegmentInstructionClauses(
      "Tom has 3 cats, and Sue has 5 dogs. How many pets are there?");
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].text == "Tom has 3 cats");
  CHECK(segs[0].kind == SegmentKind::kClause);
  CHECK(segs[1].text == "and Sue has 5 dogs.");
  CHECK(segs[1].kind == SegmentKind::kClause);
  CHECK(segs[2].text == "How many pets are there?");
  CHECK(segs[2].kind == SegmentKind::kQuestion);
  CHECK_FALSE(segs[2].has_numeral);

  auto single = SegmentInstructionClauses("Compute the sum.");
  REQUIRE(single.size() == 1);
  CHECK(single[0].kind == SegmentKind::kClause);

  auto q = SegmentInstructionClauses("What is 2+2?");
  REQUIRE(q.size() == 1);
  CHECK(q[0].kind == SegmentKind::kQuestion);
  CHECK(q[0].has_numeral);
}

TEST_CASE("list commas and thousands separators do not split clauses") {
  CHECK(SegmentInstructionClauses("She buys apples, pears, and plums.").size() == 1);
  CHECK(SegmentInstructionClauses("The farm sold 1,200 eggs on the first day.").size() == 1);
  auto semi = SegmentInstructionClauses("A box holds 12 pens; a bag holds 30 more pens.");
  REQUIRE(semi.size() == 2);
  CHECK(semi[0].text == "A box holds 12 pens");
}

TEST_CASE("numeral detection") {
  CHECK(DetectNumerals("twice as old as the average"));
  CHECK_FALSE(DetectNumerals("the answer is unknown"));
  CHECK(DetectNumerals("item costs $4.99"));
  CHECK(DetectNumerals("Half of them"));
  CHECK(DetectNumerals("SEVENTY sheep"));
  CHECK(DetectNumerals("one-third of the class"));
  CHECK_FALSE(DetectNumerals("someone is lonely"));   // "one" inside words
  CHECK_FALSE(DetectNumerals("often the tent"));
  CHECK(DetectNumerals("the tent is ten"));
}

TEST_CASE("decimal guard holds for every digits.digits string") {
  std::mt19937_64 g(17);
  std::uniform_int_distribution<int> digits(1, 6), d(0, 9);
  for (int trial = 0; trial < 500; ++trial) {
    std::string num;
    for (int i = digits(g); i > 0; --i) num += static_cast<char>('0' + d(g));
    const std::size_t dot = num.size();
    num += '.';
    for (int i = digits(g); i > 0; --i) num += static_cast<char>('0' + d(g));
    const std::string src = "It costs " + num + " dollars. Then " + num + " more.";
    auto steps = SegmentCotSteps(src);
    CHECK(steps.size() == 2);
    for (const auto& seg : steps) {
      CHECK(seg.text.find(num) != std::string::npos);
    }
    auto clauses = SegmentInstructionClauses(src);
    for (const auto& seg : clauses) {
      const std::size_t at = src.find(num);
      CHECK_FALSE((seg.span.end > at && seg.span.end <= at + dot));
    }
  }
}

TEST_CASE("cot steps agree with the two-level oracle") {
  const std::vector<std::string> alphabet = {"a", "b", " ", "\n", ".", "!", "?", "1", "2",
                                             "\t", "\xC3\xA9", "x y", ". ", "3.5"};
  std::mt19937_64 g(23);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::string src = RandomString(g, alphabet, 24);
    auto segs = SegmentCotSteps(src);
    CheckStructure(src, segs);
    REQUIRE(Texts(segs) == OracleSteps(src));
  }
}

TEST_CASE("clauses agree with the rule oracle on all short token strings") {
  const std::vector<std::string> tokens = {"w ", "1 ", ", ", "; ", ". ", "? ", "2,3 "};
  // Every sequence of up to 7 tokens: 7^7 + ... strings.
  std::vector<std::size_t> idx;
  std::size_t checked = 0;
  for (std::size_t len = 1; len <= 7; ++len) {
    idx.assign(len, 0);
    while (true) {
      std::string src;
      for (auto i : idx) src += tokens[i];
      auto segs = SegmentInstructionClauses(src);
      CheckStructure(src, segs);
      REQUIRE(Texts(segs) == OracleClauses(src));
      for (const auto& seg : segs) {
        const bool q = !text::Trim(seg.text).empty() && text::Trim(seg.text).back() == '?';
        CHECK((seg.kind == SegmentKind::kQuestion) == q);
      }
      ++checked;
      std::size_t k = 0;
      while (k < len && ++idx[k] == tokens.size()) idx[k++] = 0;
      if (k == len) break;
    }
  }
  CHECK(checked > 900000);
}

TEST_CASE("random clause strings agree with the oracle") {
  const std::vector<std::string> alphabet = {"Tom", " ", "has", "3", ",", ";", ".", "?",
                                             "cats", "1,5", "\n", "\xE2\x82\xAC", "2.5"};
  std::mt19937_64 g(29);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::string src = RandomString(g, alphabet, 30);
    auto segs = SegmentInstructionClauses(src);
    CheckStructure(src, segs);
    REQUIRE(Texts(segs) == OracleClauses(src));
  }
}

TEST_CASE("reconstruction over random byte strings") {
  std::mt19937_64 g(31);
  std::uniform_int_distribution<int> byte(1, 255), len(1, 40);
  for (int trial = 0; trial < 3000; ++trial) {
    std::string src;
    for (int i = len(g); i > 0; --i) src += static_cast<char>(byte(g));
    CheckStructure(src, SegmentCotSteps(src));
    CheckStructure(src, SegmentPotStatements(src));
    CheckStructure(src, SegmentInstructionClauses(src));
    CHECK(SegmentCotSteps(src) == SegmentCotSteps(src));
  }
}
