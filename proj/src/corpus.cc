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

#include "dualforge/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "dualforge/error.h"
#include "dualforge/jsonl.h"
#include "dualforge/text.h"

namespace dualforge {

using nlohmann::json;

std::string_view ToString(ThoughtKind kind) {
  return kind == ThoughtKind::kCoT ? "cot" : "pot";
}

ThoughtKind ParseThoughtKind(std::string_view s) {
  if (s == "cot") return ThoughtKind::kCoT;
  if (s == "pot") return ThoughtKind::kPoT;
  throw DataError("unknown thought_kind \"" + std::string(s) + "\"");
}

std::vector<Violation> ValidateRecord(const SourceRecord& record) {
  std::vector<Violation> out;
  if (record.id.empty()) out.push_back({"id", "must be non-empty"});
  if (text::IsBlank(record.instruction)) {
    out.push_back({"instruction", "empty after whitespace trimming"});
  }
  if (text::IsBlank(record.response)) {
    out.push_back({"response", "empty after whitespace trimming"});
  }
  if (record.thought_kind != ThoughtKind::kCoT &&
      record.thought_kind != ThoughtKind::kPoT) {
    out.push_back({"thought_kind", "not one of cot/pot"});
  }
  return out;
}

namespace {

std::string RequireString(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field \"") + key + "\"");
  if (!it->is_string()) {
    throw DataError(std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

SourceRecord RecordFromJson(const json& j) {
  if (!j.is_object()) throw DataError("line is not a JSON object");
  SourceRecord r;
  r.id = RequireString(j, "id");
  r.source = RequireString(j, "source");
  r.instruction = RequireString(j, "instruction");
  r.response = RequireString(j, "response");
  r.thought_kind = ParseThoughtKind(RequireString(j, "thought_kind"));
  if (auto it = j.find("answer"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("field \"answer\" must be a string or null");
    r.answer = it->get<std::string>();
  }
  return r;
}

json RecordToJson(const SourceRecord& r) {
  return json{{"id", r.id},
              {"source", r.source},
              {"instruction", r.instruction},
              {"response", r.response},
              {"thought_kind", ToString(r.thought_kind)},
              {"answer", r.answer ? json(*r.answer) : json(nullptr)}};
}

void CheckOption(const BenchmarkItem& item) {
  std::set<char> labels;
  for (const auto& opt : item.options) {
    if (opt.label < 'A' || opt.label > 'E') {
      throw DataError("item " + item.id + ": option label must be a letter A-E");
    }
    if (!labels.insert(opt.label).second) {
      throw DataError("item " + item.id + ": duplicate option label " +
                      std::string(1, opt.label));
    }
  }
}

BenchmarkItem ItemFromJson(const json& j, std::string_view benchmark) {
  if (!j.is_object()) throw DataError("line is not a JSON object");
  BenchmarkItem item;
  item.id = RequireString(j, "id");
  item.benchmark = std::string(benchmark);
  item.question = RequireString(j, "question");
  item.gold = RequireString(j, "gold");
  const std::string form = RequireString(j, "answer_form");
  if (form == "open") {
    item.answer_form = AnswerForm::kOpen;
  } else if (form == "multiple_choice") {
    item.answer_form = AnswerForm::kMultipleChoice;
  } else {
    throw DataError("unknown answer_form \"" + form + "\"");
  }
  if (auto it = j.find("options"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("field \"options\" must be an array or null");
    for (const auto& o : *it) {
      if (!o.is_object()) throw DataError("option must be an object");
      const std::string label = RequireString(o, "label");
      if (label.size() != 1) {
        throw DataError("item " + item.id + ": option label must be one letter");
      }
      item.options.push_back({label[0], RequireString(o, "text")});
    }
  }
  if (text::IsBlank(item.question)) {
    throw DataError("item " + item.id + ": empty question");
  }
  if (item.answer_form == AnswerForm::kMultipleChoice) {
    if (item.options.empty()) {
      throw DataError("item " + item.id + ": multiple_choice item without options");
    }
    CheckOption(item);
    const bool gold_is_label =
        item.gold.size() == 1 &&
        std::any_of(item.options.begin(), item.options.end(),
                    [&](const OptionChoice& o) { return o.label == item.gold[0]; });
    if (!gold_is_label) {
      throw DataError("item " + item.id + ": gold \"" + item.gold +
                      "\" is not an option label");
    }
  } else if (!item.options.empty()) {
    throw DataError("item " + item.id + ": open item must not carry options");
  }
  return item;
}

json ItemToJson(const BenchmarkItem& item) {
  json options = nullptr;
  if (!item.options.empty()) {
    options = json::array();
    for (const auto& o : item.options) {
      options.push_back({{"label", std::string(1, o.label)}, {"text", o.text}});
    }
  }
  return json{{"id", item.id},
              {"question", item.question},
              {"answer_form", item.answer_form == AnswerForm::kOpen ? "open"
                                                                     : "multiple_choice"},
              {"options", options},
              {"gold", item.gold}};
}

}  // namespace

Corpus LoadCorpus(const std::filesystem::path& path) {
  Corpus corpus;
  corpus.manifest.name = path.stem().string();
  corpus.manifest.path = path;
  corpus.manifest.thought_kind_counts = {{ThoughtKind::kCoT, 0},
                                         {ThoughtKind::kPoT, 0}};
  std::unordered_map<std::string, std::size_t> first_line;
  jsonl::ForEachLine(path, [&](std::size_t line_no, const json& j) {
    SourceRecord r = RecordFromJson(j);
    if (auto v = ValidateRecord(r); !v.empty()) {
      throw DataError("field \"" + v.front().field + "\" " + v.front().message);
    }
    auto [it, inserted] = first_line.emplace(r.id, line_no);
    if (!inserted) {
      throw DataError("duplicate id \"" + r.id + "\" (first at line " +
                      std::to_string(it->second) + ")");
    }
    ++corpus.manifest.thought_kind_counts[r.thought_kind];
    corpus.records.push_back(std::move(r));
  });
  corpus.manifest.record_count = corpus.records.size();
  std::size_t sum = 0;
  for (const auto& [kind, n] : corpus.manifest.thought_kind_counts) sum += n;
  if (sum != corpus.manifest.record_count) {
    throw DataError("manifest count mismatch for " + path.string());
  }
  return corpus;
}

void WriteCorpus(const std::vector<SourceRecord>& records,
                 const std::filesystem::path& path) {
  jsonl::Writer out(path);
  for (const auto& r : records) out.Write(RecordToJson(r));
}

std::vector<BenchmarkItem> LoadBenchmark(const std::filesystem::path& path,
                                         std::string_view benchmark) {
  if (benchmark.empty()) throw UsageError("benchmark name must be non-empty");
  std::vector<BenchmarkItem> items;
  std::unordered_map<std::string, std::size_t> first_line;
  jsonl::ForEachLine(path, [&](std::size_t line_no, const json& j) {
    BenchmarkItem item = ItemFromJson(j, benchmark);
    auto [it, inserted] = first_line.emplace(item.id, line_no);
    if (!inserted) {
      throw DataError("duplicate id \"" + item.id + "\" (first at line " +
                      std::to_string(it->second) + ")");
    }
    items.push_back(std::move(item));
  });
  return items;
}

void WriteBenchmark(const std::vector<BenchmarkItem>& items,
                    const std::filesystem::path& path) {
  jsonl::Writer out(path);
  for (const auto& item : items) out.Write(ItemToJson(item));
}

}  // namespace dualforge
