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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"

#include "dualforge/numeric.h"
#include "dualforge/rng.h"
#include "dualforge/text.h"

namespace text = dualforge::text;
namespace rng = dualforge::rng;

TEST_CASE("trim and collapse") {
  CHECK(text::Trim("  a b \n") == "a b");
  CHECK(text::Trim(" \t\n") == "");
  CHECK(text::IsBlank(" \r\n"));
  CHECK_FALSE(text::IsBlank(" x "));
  CHECK(text::CollapseWhitespace("  A\t\tb \n c ") == "A b c");
  CHECK(text::CountOccurrences("<MASK> x <MASK><MASK>", "<MASK>") == 3);
  CHECK(text::CountOccurrences("aaaa", "aa") == 2);
  CHECK(text::ReplaceAll("a.b.c", ".", "::") == "a::b::c");
  CHECK(text::Join({"x", "y", "z"}, "\n") == "x\ny\nz");
  CHECK(text::Join({}, ",") == "");
}

TEST_CASE("scalar offsets") {
  const std::string s = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80z";  // a é € 😀 z
  CHECK(text::IsValidUtf8(s));
  CHECK(text::ScalarLength(s) == 5);
  CHECK(text::ScalarToByteOffset(s, 0) == 0);
  CHECK(text::ScalarToByteOffset(s, 1) == 1);
  CHECK(text::ScalarToByteOffset(s, 2) == 3);
  CHECK(text::ScalarToByteOffset(s, 3) == 6);
  CHECK(text::ScalarToByteOffset(s, 4) == 10);
  CHECK(text::ScalarToByteOffset(s, 5) == s.size());
  CHECK_FALSE(text::IsValidUtf8("\xC3"));
  CHECK_FALSE(text::IsValidUtf8("\xFF"));
  CHECK_FALSE(text::IsValidUtf8("\xC0\x80"));
}

TEST_CASE("decimal parsing and formatting") {
  CHECK(text::ParseDecimal("42") == 42.0);
  CHECK(text::ParseDecimal("-0.5") == -0.5);
  CHECK(text::ParseDecimal("3.") == 3.0);
  CHECK_FALSE(text::ParseDecimal("1e5").has_value());
  CHECK_FALSE(text::ParseDecimal("").has_value());
  CHECK_FALSE(text::ParseDecimal("12abc").has_value());
  CHECK(text::FormatNumber(0.0) == "0");
  CHECK(text::FormatNumber(-0.0) == "0");
  CHECK(text::FormatNumber(36.0) == "36");
  CHECK(text::FormatNumber(0.15) == "0.15");
  CHECK(text::FormatNumber(-2.5) == "-2.5");
  CHECK(text::FormatNumber(1e20) == "100000000000000000000");
}

TEST_CASE("format/parse round trip is exact") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = d(gen);
    const auto back = text::ParseDecimal(text::FormatNumber(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
}

TEST_CASE("counting helpers snap float noise") {
  CHECK(dualforge::CeilCount(0.15 * 20) == 3);  // 3.0000000000000004
  CHECK(dualforge::CeilCount(0.6 * 5) == 3);
  CHECK(dualforge::CeilCount(2.01) == 3);
  CHECK(dualforge::RoundCount(0.5) == 0);
  CHECK(dualforge::RoundCount(1.5) == 2);
  CHECK(dualforge::RoundCount(2.5) == 2);
  CHECK(dualforge::RoundCount(0.2 * 7) == 1);
  CHECK(dualforge::RoundCount(0.6 * 2.5 * 2) == 3);
  CHECK(dualforge::RoundCount(2.49) == 2);
  CHECK(dualforge::RoundCount(2.51) == 3);
}

TEST_CASE("hash keys are stable") {
  // Published FNV-1a test vectors.
  CHECK(rng::Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(rng::Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(rng::Fnv1a64("foobar") == 0x85944171f73967e8ULL);
  // splitmix64 reference: first output for state 0 is mix(0x9e3779b97f4a7c15).
  CHECK(rng::SplitMix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(rng::KeyFor(0, "x") != rng::KeyFor(1, "x"));
  CHECK(rng::KeyFor(0, "x") != rng::KeyFor(0, "y"));
}

TEST_CASE("bounded draws are uniform") {
  rng::Generator g(rng::KeyFor(11, "uniform"));
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[g.Below(6)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  CHECK(chi2 < 20.5);  // 5 dof, p ~ 0.001
}

TEST_CASE("sampling without replacement") {
  rng::Generator g(3);
  for (std::size_t n = 1; n < 30; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      auto picks = g.SampleWithoutReplacement(n, k);
      REQUIRE(picks.size() == k);
      std::set<std::size_t> uniq(picks.begin(), picks.end());
      CHECK(uniq.size() == k);
      for (auto p : picks) CHECK(p < n);
    }
  }
  // Every 2-subset of 4 shows up with roughly equal frequency.
  std::map<std::pair<std::size_t, std::size_t>, int> freq;
  for (int i = 0; i < 12000; ++i) {
    auto p = g.SampleWithoutReplacement(4, 2);
    freq[{std::min(p[0], p[1]), std::max(p[0], p[1])}]++;
  }
  CHECK(freq.size() == 6);
  for (const auto& [pair, c] : freq) CHECK(std::abs(c - 2000) < 200);
}

TEST_CASE("same key, same stream") {
  rng::Generator a(rng::KeyFor(5, "s")), b(rng::KeyFor(5, "s"));
  std::vector<int> va(50), vb(50);
  for (int i = 0; i < 50; ++i) va[i] = vb[i] = i;
  a.Shuffle(va);
  b.Shuffle(vb);
  CHECK(va == vb);
  std::vector<int> sorted = va;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}
