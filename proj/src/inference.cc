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

#include "dualforge/inference.h"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "dualforge/error.h"
#include "dualforge/jsonl.h"
#include "dualforge/text.h"

namespace dualforge {

using nlohmann::json;

std::string_view ToString(OutcomePath path) {
  switch (path) {
    case OutcomePath::kPotSucceeded:
      return "pot_succeeded";
    case OutcomePath::kCotFallback:
      return "cot_fallback";
    case OutcomePath::kOptionDirect:
      return "option_direct";
    case OutcomePath::kOptionClosest:
      return "option_closest";
    case OutcomePath::kUnresolved:
      return "unresolved";
  }
  return "unresolved";
}

OutcomePath ParseOutcomePath(std::string_view s) {
  for (OutcomePath p : kAllPaths) {
    if (ToString(p) == s) return p;
  }
  throw DataError("unknown outcome path \"" + std::string(s) + "\"");
}

bool InferenceOutcome::SameResult(const InferenceOutcome& o) const {
  return item_id == o.item_id && benchmark == o.benchmark && pot_prompt == o.pot_prompt &&
         pot_generation == o.pot_generation && pot_exec == o.pot_exec &&
         cot_generation == o.cot_generation && resolved_answer == o.resolved_answer &&
         chosen_label == o.chosen_label && path == o.path && closest_prompt == o.closest_prompt &&
         error_label == o.error_label;
}

namespace {

template <typename T>
json Nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::string> OptionalString(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

GenerationRequest MakeRequest(std::string prompt, const InferenceOptions& options) {
  GenerationRequest req;
  req.prompt = std::move(prompt);
  req.max_new = options.max_new;
  req.temperature = options.temperature;
  req.stop = options.stop;
  return req;
}

std::string Labels(const BenchmarkItem& item) {
  std::string labels;
  for (const auto& o : item.options) labels.push_back(o.label);
  return labels;
}

}  // namespace

json ToJson(const InferenceOutcome& o) {
  return {{"item_id", o.item_id},
          {"benchmark", o.benchmark},
          {"pot_prompt", o.pot_prompt},
          {"pot_generation", o.pot_generation},
          {"pot_exec", ToJson(o.pot_exec)},
          {"cot_generation", Nullable(o.cot_generation)},
          {"resolved_answer", Nullable(o.resolved_answer)},
          {"chosen_label",
           o.chosen_label ? json(std::string(1, *o.chosen_label)) : json(nullptr)},
          {"path", ToString(o.path)},
          {"closest_prompt", Nullable(o.closest_prompt)},
          {"wall_time_ms", o.wall_time.count()},
          {"error_label", Nullable(o.error_label)}};
}

InferenceOutcome OutcomeFromJson(const json& j) {
  InferenceOutcome o;
  o.item_id = j.at("item_id").get<std::string>();
  o.benchmark = j.value("benchmark", "");
  o.pot_prompt = j.value("pot_prompt", "");
  o.pot_generation = j.value("pot_generation", "");
  o.pot_exec = ExecResultFromJson(j.at("pot_exec"));
  o.cot_generation = OptionalString(j, "cot_generation");
  o.resolved_answer = OptionalString(j, "resolved_answer");
  if (auto label = OptionalString(j, "chosen_label")) {
    if (label->size() != 1) throw DataError("chosen_label must be one letter");
    o.chosen_label = (*label)[0];
  }
  o.path = ParseOutcomePath(j.at("path").get<std::string>());
  o.closest_prompt = OptionalString(j, "closest_prompt");
  o.wall_time = std::chrono::duration<double, std::milli>(j.value("wall_time_ms", 0.0));
  o.error_label = OptionalString(j, "error_label");
  if (o.path == OutcomePath::kPotSucceeded && !IsValue(o.pot_exec)) {
    throw DataError("outcome " + o.item_id + ": pot_succeeded without a value");
  }
  if (o.path == OutcomePath::kCotFallback && !o.cot_generation) {
    throw DataError("outcome " + o.item_id + ": cot_fallback without a CoT generation");
  }
  return o;
}

InferenceOutcome RunItem(const BenchmarkItem& item, const ModelClient& client,
                         const Executor& executor, const InferenceOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  InferenceOutcome out;
  out.item_id = item.id;
  out.benchmark = item.benchmark;

  out.pot_prompt = SerializePrompt(item.question + options.program_suffix, options.serialize);
  try {
    out.pot_generation = client.Generate(MakeRequest(out.pot_prompt, options));
    if (auto program = ExtractProgram(out.pot_generation)) {
      out.pot_exec = executor.Execute(*program);
    } else {
      out.pot_exec = ExecFailure{FailureReason::kEmptyOutput, "no program in generation"};
    }
  } catch (const TransportError& e) {
    out.pot_exec = ExecFailure{FailureReason::kException, std::string("transport: ") + e.what()};
  }

  std::optional<std::string> answer_text;
  // Where a standalone option letter may be read from.
  std::optional<std::string> letter_scope;
  if (const auto* value = std::get_if<ExecValue>(&out.pot_exec)) {
    out.path = OutcomePath::kPotSucceeded;
    answer_text = value->text;
    letter_scope = value->text;
  } else {
    out.cot_generation =
        client.Generate(MakeRequest(SerializePrompt(item.question, options.serialize), options));
    out.path = OutcomePath::kCotFallback;
    answer_text = ExtractAnswer(*out.cot_generation);
    if (auto marker_end = FindLastAnswerMarker(*out.cot_generation)) {
      letter_scope = out.cot_generation->substr(*marker_end);
    } else {
      letter_scope = answer_text;
    }
  }

  if (item.answer_form == AnswerForm::kOpen) {
    if (answer_text) {
      out.resolved_answer = NormalizeAnswer(*answer_text).ToString();
    } else {
      out.path = OutcomePath::kUnresolved;
    }
  } else {
    const std::string labels = Labels(item);
    std::optional<char> letter;
    if (letter_scope) letter = FindOptionLetter(*letter_scope, labels);
    if (letter) {
      out.path = OutcomePath::kOptionDirect;
      out.chosen_label = letter;
      out.resolved_answer = std::string(1, *letter);
    } else if (answer_text && !text::IsBlank(*answer_text)) {
      const CanonicalAnswer canonical = NormalizeAnswer(*answer_text);
      ClosestChoice choice =
          ClosestOption(canonical, item.options, options.closest_option_template);
      out.closest_prompt = choice.prompt;
      if (options.closest_mode == ClosestOptionMode::kModel) {
        const std::string reply = client.Generate(
            MakeRequest(SerializePrompt(choice.prompt, options.serialize), options));
        if (auto picked = FindOptionLetter(reply, labels)) choice.label = *picked;
      }
      out.path = OutcomePath::kOptionClosest;
      out.chosen_label = choice.label;
      out.resolved_answer = canonical.ToString();
    } else {
      out.path = OutcomePath::kUnresolved;
    }
  }

  out.wall_time = std::chrono::steady_clock::now() - started;
  return out;
}

void RunItems(const std::vector<BenchmarkItem>& items, const ModelClient& client,
              const Executor& executor, const InferenceOptions& options, int concurrency,
              const std::function<void(const InferenceOutcome&)>& sink) {
  if (concurrency < 1) throw UsageError("concurrency must be >= 1");
  const std::size_t n = items.size();
  std::vector<std::optional<InferenceOutcome>> done(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr failure;
  std::size_t flushed = 0;

  // Emits the longest finished prefix; called with `mu` held.
  auto flush = [&] {
    while (flushed < n && done[flushed]) {
      sink(*done[flushed]);
      done[flushed].reset();
      ++flushed;
    }
  };

  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        InferenceOutcome outcome = RunItem(items[i], client, executor, options);
        std::lock_guard<std::mutex> lock(mu);
        done[i] = std::move(outcome);
        flush();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  const auto threads = static_cast<std::size_t>(concurrency) < n ? static_cast<std::size_t>(concurrency) : n;
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  if (threads > 0) worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<InferenceOutcome> ReadOutcomeFile(const std::filesystem::path& path) {
  std::vector<InferenceOutcome> out;
  jsonl::ForEachLine(path, [&](std::size_t, const json& j) { out.push_back(OutcomeFromJson(j)); });
  return out;
}

std::set<std::string> PrepareResume(const std::filesystem::path& path) {
  std::set<std::string> ids;
  if (!std::filesystem::exists(path)) return ids;
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  if (!content.empty() && content.back() != '\n') {
    const std::size_t keep = content.rfind('\n');
    content.resize(keep == std::string::npos ? 0 : keep + 1);
    std::ofstream rewrite(path, std::ios::binary | std::ios::trunc);
    rewrite << content;
    if (!rewrite) throw Error("cannot rewrite " + path.string());
  }
  for (const auto& o : ReadOutcomeFile(path)) ids.insert(o.item_id);
  return ids;
}

}  // namespace dualforge
