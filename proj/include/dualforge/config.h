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

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "dualforge/evalreport.h"
#include "dualforge/executor.h"
#include "dualforge/inference.h"
#include "dualforge/masker.h"
#include "dualforge/mixer.h"
#include "dualforge/model_client.h"

namespace dualforge {

// TOML subset: [table] and [dotted.table] headers, bare keys, basic and
// literal strings, integers, floats, booleans, single-line arrays, comments.
// Throws UsageError with the line number on anything else.
nlohmann::json ParseToml(std::string_view source);
std::string TomlQuote(std::string_view s);

enum class ExecutorKind { kSandbox, kMock };

std::string_view ToString(ExecutorKind kind);
ExecutorKind ParseExecutorKind(std::string_view s);

// Training hyper-parameters kept only as metadata next to the data; nothing
// here trains a model.
struct TrainingMetadata {
  double learning_rate = 2e-5;
  int batch_size = 128;
  double weight_decay = 0.01;
  double gradient_clip = 1.0;
  double warmup_ratio = 0.03;
  std::string warmup_type = "cosine";
  int context_length = 2048;
  int epochs = 3;
};

struct Config {
  SerializeOptions serialize;
  MaskerOptions masker;
  MixSpec mix;
  InferenceOptions inference;  // serialize copied in on Validate()
  ExecutorKind executor = ExecutorKind::kSandbox;
  SandboxOptions sandbox;
  HttpClientOptions endpoint;
  int concurrency = 4;
  GainMode gain_mode = GainMode::kFixedFraction;
  TrainingMetadata training;

  // Checks placeholder presence and value ranges; throws DataError.
  void Validate() const;

  static Config FromToml(std::string_view source);
  static Config Load(const std::filesystem::path& path);
  std::string ToToml() const;
};

}  // namespace dualforge
