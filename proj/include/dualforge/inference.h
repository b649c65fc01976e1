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

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "dualforge/answer.h"
#include "dualforge/corpus.h"
#include "dualforge/executor.h"
#include "dualforge/mixer.h"
#include "dualforge/model_client.h"

namespace dualforge {

enum class OutcomePath { kPotSucceeded, kCotFallback, kOptionDirect, kOptionClosest, kUnresolved };

inline constexpr OutcomePath kAllPaths[] = {OutcomePath::kPotSucceeded, OutcomePath::kCotFallback,
                                            OutcomePath::kOptionDirect, OutcomePath::kOptionClosest,
                                            OutcomePath::kUnresolved};

std::string_view ToString(OutcomePath path);
OutcomePath ParseOutcomePath(std::string_view s);

enum class ClosestOptionMode {
  kLocal,  // nearest option computed here
  kModel,  // the closest-option prompt is sent to the model
};

struct InferenceOptions {
  SerializeOptions serialize;
  std::string program_suffix = " Let's write a program.";
  std::string closest_option_template{kDefaultClosestOptionTemplate};
  ClosestOptionMode closest_mode = ClosestOptionMode::kLocal;
  int max_new = 1500;
  double temperature = 0.0;
  std::vector<std::string> stop;
};

struct InferenceOutcome {
  std::string item_id;
  std::string benchmark;
  std::string pot_prompt;
  std::string pot_generation;
  ExecResult pot_exec = ExecFailure{};
  std::optional<std::string> cot_generation;
  std::optional<std::string> resolved_answer;
  std::optional<char> chosen_label;
  OutcomePath path = OutcomePath::kUnresolved;
  std::optional<std::string> closest_prompt;
  std::chrono::duration<double, std::milli> wall_time{0};
  // Reserved for hand annotation of error types.
  std::optional<std::string> error_label;

  // Equality ignores wall_time.
  bool SameResult(const InferenceOutcome& other) const;
};

nlohmann::json ToJson(const InferenceOutcome& outcome);
InferenceOutcome OutcomeFromJson(const nlohmann::json& j);

// PoT first; CoT fallback iff the program failed; for multiple choice, a
// standalone option letter wins over closest-option matching. Throws
// TransportError when the CoT generation (or a model-mediated closest-option
// query) cannot be obtained.
InferenceOutcome RunItem(const BenchmarkItem& item, const ModelClient& client,
                         const Executor& executor, const InferenceOptions& options = {});

// Evaluates items on up to `concurrency` threads; `sink` receives outcomes in
// item order, from one thread at a time. The first exception stops the run
// and is rethrown once workers have joined; outcomes already passed to the
// sink stay written.
void RunItems(const std::vector<BenchmarkItem>& items, const ModelClient& client,
              const Executor& executor, const InferenceOptions& options, int concurrency,
              const std::function<void(const InferenceOutcome&)>& sink);

std::vector<InferenceOutcome> ReadOutcomeFile(const std::filesystem::path& path);

// Ids already present in an outcome file. A trailing partial line (from an
// interrupted run) is removed from the file first.
std::set<std::string> PrepareResume(const std::filesystem::path& path);

}  // namespace dualforge
