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

#include "dualforge/masker.h"

#include <algorithm>

#include "dualforge/error.h"
#include "dualforge/numeric.h"
#include "dualforge/rng.h"
#include "dualforge/segmenter.h"
#include "dualforge/template.h"
#include "dualforge/text.h"

namespace dualforge {

std::string_view ToString(TaskKind task) {
  switch (task) {
    case TaskKind::kBase:
      return "base";
    case TaskKind::kIrsp:
      return "irsp";
    case TaskKind::kIr:
      return "ir";
  }
  return "base";
}

TaskKind ParseTaskKind(std::string_view s) {
  if (s == "base") return TaskKind::kBase;
  if (s == "irsp") return TaskKind::kIrsp;
  if (s == "ir") return TaskKind::kIr;
  throw DataError("unknown task \"" + std::string(s) + "\"");
}

std::string_view ToString(SkipReason reason) {
  switch (reason) {
    case SkipReason::kTooFewSegments:
      return "too_few_segments";
    case SkipReason::kNoEligibleSegment:
      return "no_eligible_segment";
    case SkipReason::kContainsMaskTag:
      return "contains_mask_tag";
  }
  return "unknown";
}

void MaskPolicy::Validate() const {
  if (!(r_mask > 0.0 && r_mask < 1.0)) {
    throw DataError("r_mask must lie in (0,1), got " + std::to_string(r_mask));
  }
  if (min_masked < 1 || min_revealed < 1) {
    throw DataError("min_masked and min_revealed must be >= 1");
  }
}

MaskPolicy DefaultIrspPolicy() { return MaskPolicy{0.15, 1, 1, 0}; }
MaskPolicy DefaultIrPolicy() { return MaskPolicy{0.6, 1, 1, 0}; }

std::vector<std::size_t> SelectMaskIndices(std::size_t n_segments,
                                           const std::vector<std::size_t>& eligible,
                                           const MaskPolicy& policy,
                                           std::string_view salt) {
  policy.Validate();
  if (n_segments < 2) {
    throw DataError("unmaskable: cannot keep one revealed and one masked");
  }
  if (eligible.empty()) throw DataError("no eligible segments");
  for (std::size_t idx : eligible) {
    if (idx >= n_segments) throw DataError("eligible index out of range");
  }
  if (n_segments <= policy.min_revealed) {
    throw DataError("unmaskable: cannot keep one revealed and one masked");
  }
  const std::size_t upper = std::min(eligible.size(), n_segments - policy.min_revealed);
  const std::size_t wanted = CeilCount(policy.r_mask * static_cast<double>(n_segments));
  const std::size_t count = std::min(std::max(wanted, policy.min_masked), upper);

  rng::Generator gen(rng::KeyFor(policy.seed, salt));
  std::vector<std::size_t> picked;
  picked.reserve(count);
  for (std::size_t i : gen.SampleWithoutReplacement(eligible.size(), count)) {
    picked.push_back(eligible[i]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

namespace {

struct MaskedText {
  std::string text;
  std::vector<std::string> parts;
};

MaskedText ApplyMask(std::string_view source, const Segmentation& segments,
                     const std::vector<std::size_t>& masked) {
  MaskedText out;
  std::size_t cursor = 0;
  for (std::size_t idx : masked) {
    const Segment& seg = segments[idx];
    out.text.append(source.substr(cursor, seg.span.start - cursor));
    out.text.append(kMaskTag);
    out.parts.push_back(seg.text);
    cursor = seg.span.end;
  }
  out.text.append(source.substr(cursor));
  return out;
}

bool CarriesMaskTag(const SourceRecord& record) {
  return record.instruction.find(kMaskTag) != std::string::npos ||
         record.response.find(kMaskTag) != std::string::npos;
}

MaskedExample Assemble(TaskKind task, const SourceRecord& record,
                       const MaskPolicy& policy, std::vector<std::size_t> masked,
                       MaskedText masked_text, std::string rendered) {
  MaskedExample ex;
  ex.task = task;
  ex.source_id = record.id;
  ex.rendered_input = std::move(rendered);
  ex.target_parts = std::move(masked_text.parts);
  ex.target = text::Join(ex.target_parts, "\n");
  ex.masked_indices = std::move(masked);
  ex.policy_used = policy;
  return ex;
}

}  // namespace

BuildResult BuildIrspExample(const SourceRecord& record, const MaskPolicy& policy,
                             const MaskerOptions& options) {
  return BuildIrspExample(record, policy, options, record.id);
}

BuildResult BuildIrspExample(const SourceRecord& record, const MaskPolicy& policy,
                             const MaskerOptions& options, std::string_view salt) {
  if (CarriesMaskTag(record)) return Skip{SkipReason::kContainsMaskTag, record.id};
  const Segmentation steps = record.thought_kind == ThoughtKind::kCoT
                                 ? SegmentCotSteps(record.response)
                                 : SegmentPotStatements(record.response);
  if (steps.size() < 2 || steps.size() <= policy.min_revealed) {
    return Skip{SkipReason::kTooFewSegments, record.id};
  }

  std::vector<std::size_t> eligible(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) eligible[i] = i;
  auto masked = SelectMaskIndices(steps.size(), eligible, policy, salt);
  MaskedText thought = ApplyMask(record.response, steps, masked);

  const PromptTemplate wrapper(options.irsp_wrapper, {"instruction", "masked_thought"});
  std::string rendered = wrapper.Render(
      {{"instruction", record.instruction}, {"masked_thought", thought.text}});
  return Assemble(TaskKind::kIrsp, record, policy, std::move(masked),
                  std::move(thought), std::move(rendered));
}

BuildResult BuildIrExample(const SourceRecord& record, const MaskPolicy& policy,
                           const MaskerOptions& options) {
  return BuildIrExample(record, policy, options, record.id);
}

BuildResult BuildIrExample(const SourceRecord& record, const MaskPolicy& policy,
                           const MaskerOptions& options, std::string_view salt) {
  if (CarriesMaskTag(record)) return Skip{SkipReason::kContainsMaskTag, record.id};
  const Segmentation clauses = SegmentInstructionClauses(record.instruction);
  if (clauses.size() < 2 || clauses.size() <= policy.min_revealed) {
    return Skip{SkipReason::kTooFewSegments, record.id};
  }

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const bool question = clauses[i].kind == SegmentKind::kQuestion &&
                          options.questions_always_eligible;
    if (clauses[i].has_numeral || question) eligible.push_back(i);
  }
  if (eligible.empty()) return Skip{SkipReason::kNoEligibleSegment, record.id};

  auto masked = SelectMaskIndices(clauses.size(), eligible, policy, salt);
  MaskedText instruction = ApplyMask(record.instruction, clauses, masked);

  const PromptTemplate wrapper(options.ir_wrapper, {"response", "masked_instruction"});
  std::string rendered = wrapper.Render(
      {{"response", record.response}, {"masked_instruction", instruction.text}});
  return Assemble(TaskKind::kIr, record, policy, std::move(masked),
                  std::move(instruction), std::move(rendered));
}

BuildResult BuildMaskedExample(TaskKind task, const SourceRecord& record,
                               const MaskPolicy& policy, const MaskerOptions& options,
                               std::string_view salt) {
  switch (task) {
    case TaskKind::kIrsp:
      return BuildIrspExample(record, policy, options, salt);
    case TaskKind::kIr:
      return BuildIrExample(record, policy, options, salt);
    case TaskKind::kBase:
      break;
  }
  throw UsageError("masked examples exist only for irsp and ir");
}

nlohmann::json ToJson(const MaskPolicy& policy) {
  return {{"r_mask", policy.r_mask},
          {"min_masked", policy.min_masked},
          {"min_revealed", policy.min_revealed},
          {"seed", policy.seed}};
}

MaskPolicy MaskPolicyFromJson(const nlohmann::json& j) {
  MaskPolicy p;
  p.r_mask = j.at("r_mask").get<double>();
  p.min_masked = j.at("min_masked").get<std::size_t>();
  p.min_revealed = j.at("min_revealed").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.Validate();
  return p;
}

nlohmann::json ToJson(const MaskedExample& ex) {
  return {{"task", ToString(ex.task)},
          {"source_id", ex.source_id},
          {"rendered_input", ex.rendered_input},
          {"target", ex.target},
          {"target_parts", ex.target_parts},
          {"masked_indices", ex.masked_indices},
          {"policy", ToJson(ex.policy_used)}};
}

MaskedExample MaskedExampleFromJson(const nlohmann::json& j) {
  MaskedExample ex;
  ex.task = ParseTaskKind(j.at("task").get<std::string>());
  if (ex.task == TaskKind::kBase) throw DataError("masked example with task base");
  ex.source_id = j.at("source_id").get<std::string>();
  ex.rendered_input = j.at("rendered_input").get<std::string>();
  ex.target = j.at("target").get<std::string>();
  ex.target_parts = j.at("target_parts").get<std::vector<std::string>>();
  ex.masked_indices = j.at("masked_indices").get<std::vector<std::size_t>>();
  ex.policy_used = MaskPolicyFromJson(j.at("policy"));
  if (text::CountOccurrences(ex.rendered_input, kMaskTag) != ex.masked_indices.size() ||
      ex.target_parts.size() != ex.masked_indices.size() || ex.target.empty()) {
    throw DataError("masked example " + ex.source_id + " violates tag-count invariant");
  }
  return ex;
}

}  // namespace dualforge
