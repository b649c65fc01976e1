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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dualforge/corpus.h"
#include "dualforge/masker.h"

namespace dualforge {

inline constexpr std::string_view kDefaultSerializationTemplate =
    "Below is an instruction that describes a task. Write a response that "
    "appropriately completes the request.\n\n### Human: {instruction}\n\n"
    "### Assistant: {response}";

inline constexpr std::string_view kTrainingSchema = "dualforge-train-v1";

// How r_task is read. kRelative: auxiliary count = round(r_task * |base|).
// kShare: r_task is the auxiliary share of the final mixture.
enum class RatioSemantics { kRelative, kShare };

std::string_view ToString(RatioSemantics s);
RatioSemantics ParseRatioSemantics(std::string_view s);

struct MixSpec {
  double r_task_irsp = 0.2;
  double r_task_ir = 0.6;
  MaskPolicy irsp_policy = DefaultIrspPolicy();
  MaskPolicy ir_policy = DefaultIrPolicy();
  std::uint64_t shuffle_seed = 0;
  RatioSemantics semantics = RatioSemantics::kRelative;

  void Validate() const;
  bool operator==(const MixSpec&) const = default;
};

nlohmann::json ToJson(const MixSpec& spec);
MixSpec MixSpecFromJson(const nlohmann::json& j);

// Response offsets count Unicode scalar values.
struct ScalarSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const ScalarSpan&) const = default;
};

struct TrainingExample {
  std::string id;
  TaskKind task = TaskKind::kBase;
  std::string full_text;
  ScalarSpan response_span;
  nlohmann::json meta = nlohmann::json::object();

  // full_text restricted to response_span.
  std::string Response() const;
  bool operator==(const TrainingExample&) const = default;
};

struct SerializeOptions {
  std::string serialization_template{kDefaultSerializationTemplate};
};

// Throws DataError on empty instruction/response, UsageError when the
// template does not end with "{response}" or lacks "{instruction}".
TrainingExample SerializeExample(std::string_view instruction, std::string_view response,
                                 TaskKind task,
                                 const SerializeOptions& options = {});

// The template with an empty response slot: what a model is prompted with.
std::string SerializePrompt(std::string_view instruction,
                            const SerializeOptions& options = {});

struct MixStats {
  std::map<TaskKind, std::size_t> counts{
      {TaskKind::kBase, 0}, {TaskKind::kIrsp, 0}, {TaskKind::kIr, 0}};
  std::map<TaskKind, std::size_t> pool_sizes{{TaskKind::kIrsp, 0}, {TaskKind::kIr, 0}};
  std::map<TaskKind, std::map<SkipReason, std::size_t>> skips;
  // Extra draws beyond the pool size (with-replacement resampling).
  std::map<TaskKind, std::size_t> repeats{{TaskKind::kIrsp, 0}, {TaskKind::kIr, 0}};
};

struct Mixture {
  std::vector<TrainingExample> examples;
  MixStats stats;
};

// Prebuilt sampling pools; when absent for a task the pool is built from
// `base` with that task's policy.
struct MaskedPools {
  std::optional<std::vector<MaskedExample>> irsp;
  std::optional<std::vector<MaskedExample>> ir;
};

// Auxiliary count for a task under `spec` and `base_size` records.
std::size_t AuxiliaryCount(const MixSpec& spec, TaskKind task, std::size_t base_size);

Mixture AssembleMixture(const std::vector<SourceRecord>& base, const MixSpec& spec,
                        const MaskerOptions& masker_options = {},
                        const SerializeOptions& serialize_options = {},
                        const MaskedPools& pools = {});

struct TrainingManifest {
  std::filesystem::path path;
  std::map<TaskKind, std::size_t> counts;
  std::optional<MixSpec> spec;
  std::optional<MixStats> stats;

  nlohmann::json ToJson() const;
};

// First line is the schema header record; one example per line after it.
// Every span is checked against its response before anything is written.
TrainingManifest WriteTrainingFile(const std::vector<TrainingExample>& examples,
                                   const std::filesystem::path& path,
                                   const std::optional<MixSpec>& spec = std::nullopt,
                                   const std::optional<MixStats>& stats = std::nullopt);
std::vector<TrainingExample> ReadTrainingFile(const std::filesystem::path& path);

// Cartesian product ratio-major. The other task's ratio is zero in every
// spec; everything else comes from `base_spec`.
std::vector<MixSpec> SweepGrid(const std::vector<double>& ratios,
                               const std::vector<double>& masks, TaskKind task,
                               const MixSpec& base_spec = {});
std::vector<MixSpec> SweepGrid(TaskKind task, const MixSpec& base_spec = {});

inline const std::vector<double> kDefaultSweepRatios = {0.2, 0.4, 0.6, 0.8};
inline const std::vector<double> kDefaultSweepMasks = {0.15, 0.4, 0.6, 0.8};

}  // namespace dualforge
