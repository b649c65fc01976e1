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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualforge {

enum class ThoughtKind { kCoT, kPoT };

std::string_view ToString(ThoughtKind kind);  // "cot" / "pot"
ThoughtKind ParseThoughtKind(std::string_view s);  // throws DataError

// One <instruction, thought, answer> training triple.
struct SourceRecord {
  std::string id;
  std::string source;
  std::string instruction;
  std::string response;
  ThoughtKind thought_kind = ThoughtKind::kCoT;
  std::optional<std::string> answer;

  bool operator==(const SourceRecord&) const = default;
};

struct CorpusManifest {
  std::string name;
  std::filesystem::path path;
  std::size_t record_count = 0;
  std::map<ThoughtKind, std::size_t> thought_kind_counts;
};

struct Corpus {
  std::vector<SourceRecord> records;
  CorpusManifest manifest;
};

struct Violation {
  std::string field;
  std::string message;
};

// Empty iff every SourceRecord invariant except corpus-wide id uniqueness
// holds.
std::vector<Violation> ValidateRecord(const SourceRecord& record);

// Line-delimited JSON, one record per line, file order preserved.
// Throws DataError with the 1-based line number on any bad line.
Corpus LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::vector<SourceRecord>& records,
                 const std::filesystem::path& path);

enum class AnswerForm { kOpen, kMultipleChoice };

struct OptionChoice {
  char label = 'A';
  std::string text;

  bool operator==(const OptionChoice&) const = default;
};

struct BenchmarkItem {
  std::string id;
  std::string benchmark;
  std::string question;
  AnswerForm answer_form = AnswerForm::kOpen;
  std::vector<OptionChoice> options;  // empty for open items
  std::string gold;

  bool operator==(const BenchmarkItem&) const = default;
};

// Throws DataError for schema violations, including multiple-choice items
// whose gold is not one of the option labels.
std::vector<BenchmarkItem> LoadBenchmark(const std::filesystem::path& path,
                                         std::string_view benchmark);
void WriteBenchmark(const std::vector<BenchmarkItem>& items,
                    const std::filesystem::path& path);

}  // namespace dualforge
