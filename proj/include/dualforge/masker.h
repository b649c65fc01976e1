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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dualforge/corpus.h"

namespace dualforge {

inline constexpr std::string_view kMaskTag = "<MASK>";

enum class TaskKind { kBase, kIrsp, kIr };

std::string_view ToString(TaskKind task);  // "base" / "irsp" / "ir"
TaskKind ParseTaskKind(std::string_view s);

struct MaskPolicy {
  double r_mask = 0.15;
  std::size_t min_masked = 1;
  std::size_t min_revealed = 1;
  std::uint64_t seed = 0;

  // Throws DataError unless 0 < r_mask < 1 and both minimums are >= 1.
  void Validate() const;
  bool operator==(const MaskPolicy&) const = default;
};

// The operating points used unless configured otherwise.
MaskPolicy DefaultIrspPolicy();  // r_mask = 0.15
MaskPolicy DefaultIrPolicy();    // r_mask = 0.6

struct MaskerOptions {
  std::string irsp_wrapper =
      "Fill in the masked reasoning steps.\nInstruction: {instruction}\n"
      "Thought: {masked_thought}";
  std::string ir_wrapper =
      "Reconstruct the masked parts of the instruction.\nThought: {response}\n"
      "Instruction: {masked_instruction}";
  // When false, a question is eligible for IR masking only if it carries a
  // numeral, like any other clause.
  bool questions_always_eligible = true;
};

struct MaskedExample {
  TaskKind task = TaskKind::kIrsp;
  std::string source_id;
  std::string rendered_input;
  std::string target;                     // target_parts joined by "\n"
  std::vector<std::string> target_parts;  // masked segment texts, in order
  std::vector<std::size_t> masked_indices;
  MaskPolicy policy_used;

  bool operator==(const MaskedExample&) const = default;
};

enum class SkipReason { kTooFewSegments, kNoEligibleSegment, kContainsMaskTag };

std::string_view ToString(SkipReason reason);

struct Skip {
  SkipReason reason;
  std::string source_id;
};

using BuildResult = std::variant<MaskedExample, Skip>;

// count = clamp(ceil(r_mask * n), min_masked, min(|eligible|, n - min_revealed)),
// drawn uniformly without replacement from `eligible` with a generator keyed
// on (policy.seed, salt). Returned ascending. Throws DataError when n < 2 or
// `eligible` is empty.
std::vector<std::size_t> SelectMaskIndices(std::size_t n_segments,
                                           const std::vector<std::size_t>& eligible,
                                           const MaskPolicy& policy,
                                           std::string_view salt);

// The salt defaults to the record id; the mixer passes "<id>#<k>" for repeat
// draws.
BuildResult BuildIrspExample(const SourceRecord& record, const MaskPolicy& policy,
                             const MaskerOptions& options = {});
BuildResult BuildIrspExample(const SourceRecord& record, const MaskPolicy& policy,
                             const MaskerOptions& options, std::string_view salt);
BuildResult BuildIrExample(const SourceRecord& record, const MaskPolicy& policy,
                           const MaskerOptions& options = {});
BuildResult BuildIrExample(const SourceRecord& record, const MaskPolicy& policy,
                           const MaskerOptions& options, std::string_view salt);

// Dispatch on task (kIrsp / kIr only).
BuildResult BuildMaskedExample(TaskKind task, const SourceRecord& record,
                               const MaskPolicy& policy, const MaskerOptions& options,
                               std::string_view salt);

nlohmann::json ToJson(const MaskedExample& example);
MaskedExample MaskedExampleFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const MaskPolicy& policy);
MaskPolicy MaskPolicyFromJson(const nlohmann::json& j);

}  // namespace dualforge
