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

#include "dualforge/mixer.h"

#include <algorithm>
#include <unordered_map>

#include "dualforge/error.h"
#include "dualforge/jsonl.h"
#include "dualforge/numeric.h"
#include "dualforge/rng.h"
#include "dualforge/template.h"
#include "dualforge/text.h"

namespace dualforge {

using nlohmann::json;

std::string_view ToString(RatioSemantics s) {
  return s == RatioSemantics::kRelative ? "relative" : "share";
}

RatioSemantics ParseRatioSemantics(std::string_view s) {
  if (s == "relative") return RatioSemantics::kRelative;
  if (s == "share") return RatioSemantics::kShare;
  throw DataError("unknown ratio semantics \"" + std::string(s) + "\"");
}

void MixSpec::Validate() const {
  auto check = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw DataError(std::string(name) + " must lie in [0,1], got " + std::to_string(r));
    }
  };
  check(r_task_irsp, "r_task_irsp");
  check(r_task_ir, "r_task_ir");
  irsp_policy.Validate();
  ir_policy.Validate();
  if (semantics == RatioSemantics::kShare && r_task_irsp + r_task_ir >= 1.0) {
    throw DataError("share semantics need r_task_irsp + r_task_ir < 1");
  }
}

json ToJson(const MixSpec& spec) {
  return {{"r_task_irsp", spec.r_task_irsp},
          {"r_task_ir", spec.r_task_ir},
          {"irsp_policy", ToJson(spec.irsp_policy)},
          {"ir_policy", ToJson(spec.ir_policy)},
          {"shuffle_seed", spec.shuffle_seed},
          {"ratio_semantics", ToString(spec.semantics)}};
}

MixSpec MixSpecFromJson(const json& j) {
  MixSpec spec;
  spec.r_task_irsp = j.at("r_task_irsp").get<double>();
  spec.r_task_ir = j.at("r_task_ir").get<double>();
  spec.irsp_policy = MaskPolicyFromJson(j.at("irsp_policy"));
  spec.ir_policy = MaskPolicyFromJson(j.at("ir_policy"));
  spec.shuffle_seed = j.at("shuffle_seed").get<std::uint64_t>();
  spec.semantics = ParseRatioSemantics(j.value("ratio_semantics", "relative"));
  spec.Validate();
  return spec;
}

std::string TrainingExample::Response() const {
  const std::size_t b = text::ScalarToByteOffset(full_text, response_span.start);
  const std::size_t e = text::ScalarToByteOffset(full_text, response_span.end);
  return full_text.substr(b, e - b);
}

namespace {

const PromptTemplate& CheckedTemplate(const SerializeOptions& options,
                                      std::optional<PromptTemplate>& slot) {
  slot.emplace(options.serialization_template,
               std::vector<std::string>{"instruction", "response"});
  if (!slot->Has("instruction") || !slot->EndsWith("response")) {
    throw UsageError(
        "serialization template must contain {instruction} and end with {response}");
  }
  return *slot;
}

}  // namespace

std::string SerializePrompt(std::string_view instruction, const SerializeOptions& options) {
  std::optional<PromptTemplate> slot;
  const PromptTemplate& tmpl = CheckedTemplate(options, slot);
  return tmpl.Render({{"instruction", std::string(instruction)}, {"response", ""}});
}

TrainingExample SerializeExample(std::string_view instruction, std::string_view response,
                                 TaskKind task, const SerializeOptions& options) {
  if (instruction.empty() || response.empty()) {
    throw DataError("cannot serialize an empty instruction or response");
  }
  TrainingExample ex;
  ex.task = task;
  ex.full_text = SerializePrompt(instruction, options);
  ex.response_span.start = text::ScalarLength(ex.full_text);
  ex.full_text.append(response);
  ex.response_span.end = text::ScalarLength(ex.full_text);
  return ex;
}

std::size_t AuxiliaryCount(const MixSpec& spec, TaskKind task, std::size_t base_size) {
  const double r = task == TaskKind::kIrsp ? spec.r_task_irsp
                   : task == TaskKind::kIr ? spec.r_task_ir
                                           : 0.0;
  const auto n = static_cast<double>(base_size);
  if (spec.semantics == RatioSemantics::kRelative) return RoundCount(r * n);
  return RoundCount(r * n / (1.0 - spec.r_task_irsp - spec.r_task_ir));
}

namespace {

const MaskPolicy& PolicyFor(const MixSpec& spec, TaskKind task) {
  return task == TaskKind::kIrsp ? spec.irsp_policy : spec.ir_policy;
}

json BaseMeta(const SourceRecord& r) {
  return {{"source_id", r.id}, {"thought_kind", ToString(r.thought_kind)}};
}

}  // namespace

Mixture AssembleMixture(const std::vector<SourceRecord>& base, const MixSpec& spec,
                        const MaskerOptions& masker_options,
                        const SerializeOptions& serialize_options,
                        const MaskedPools& pools) {
  if (base.empty()) throw DataError("cannot assemble a mixture from an empty corpus");
  spec.Validate();

  Mixture mix;
  std::unordered_map<std::string_view, const SourceRecord*> by_id;
  for (const auto& r : base) {
    by_id.emplace(r.id, &r);
    TrainingExample ex =
        SerializeExample(r.instruction, r.response, TaskKind::kBase, serialize_options);
    ex.id = r.id;
    ex.meta = BaseMeta(r);
    mix.examples.push_back(std::move(ex));
  }
  mix.stats.counts[TaskKind::kBase] = base.size();

  for (TaskKind task : {TaskKind::kIrsp, TaskKind::kIr}) {
    const std::size_t wanted = AuxiliaryCount(spec, task, base.size());
    if (wanted == 0) continue;
    const auto& given = task == TaskKind::kIrsp ? pools.irsp : pools.ir;

    std::vector<MaskedExample> pool;
    if (given) {
      pool = *given;
    } else {
      for (const auto& r : base) {
        BuildResult res =
            BuildMaskedExample(task, r, PolicyFor(spec, task), masker_options, r.id);
        if (auto* ex = std::get_if<MaskedExample>(&res)) {
          pool.push_back(std::move(*ex));
        } else {
          ++mix.stats.skips[task][std::get<Skip>(res).reason];
        }
      }
    }
    mix.stats.pool_sizes[task] = pool.size();
    if (pool.empty()) {
      throw DataError("task " + std::string(ToString(task)) +
                      ": ratio > 0 but zero maskable records");
    }

    rng::Generator gen(
        rng::KeyFor(spec.shuffle_seed, "sample:" + std::string(ToString(task))));
    std::vector<MaskedExample> chosen;
    std::vector<std::string> ids;
    const std::string prefix = std::string(ToString(task)) + ":";
    if (wanted <= pool.size()) {
      auto picks = gen.SampleWithoutReplacement(pool.size(), wanted);
      std::sort(picks.begin(), picks.end());
      for (std::size_t i : picks) {
        ids.push_back(prefix + pool[i].source_id);
        chosen.push_back(pool[i]);
      }
    } else {
      for (const auto& ex : pool) {
        ids.push_back(prefix + ex.source_id);
        chosen.push_back(ex);
      }
      std::vector<std::size_t> repeat_of(pool.size(), 0);
      for (std::size_t k = pool.size(); k < wanted; ++k) {
        const auto i = static_cast<std::size_t>(gen.Below(pool.size()));
        const std::size_t rep = ++repeat_of[i];
        auto it = by_id.find(pool[i].source_id);
        if (it == by_id.end()) {
          throw DataError("pooled example " + pool[i].source_id + " has no base record");
        }
        const std::string salt = pool[i].source_id + "#" + std::to_string(rep);
        BuildResult res = BuildMaskedExample(task, *it->second, pool[i].policy_used,
                                             masker_options, salt);
        auto* ex = std::get_if<MaskedExample>(&res);
        if (ex == nullptr) {
          throw DataError("record " + pool[i].source_id + " stopped being maskable");
        }
        ids.push_back(prefix + salt);
        chosen.push_back(std::move(*ex));
      }
      mix.stats.repeats[task] = wanted - pool.size();
    }

    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const MaskedExample& m = chosen[k];
      TrainingExample ex =
          SerializeExample(m.rendered_input, m.target, task, serialize_options);
      ex.id = ids[k];
      auto it = by_id.find(m.source_id);
      ex.meta = it != by_id.end() ? BaseMeta(*it->second)
                                  : json{{"source_id", m.source_id}};
      ex.meta["policy"] = ToJson(m.policy_used);
      mix.examples.push_back(std::move(ex));
    }
    mix.stats.counts[task] = chosen.size();
  }

  rng::Generator shuffler(rng::KeyFor(spec.shuffle_seed, "shuffle"));
  shuffler.Shuffle(mix.examples);
  return mix;
}

json TrainingManifest::ToJson() const {
  json counts_json = json::object();
  for (const auto& [task, n] : counts) counts_json[std::string(dualforge::ToString(task))] = n;
  json out = {{"path", path.string()}, {"counts", counts_json}};
  out["spec"] = spec ? dualforge::ToJson(*spec) : json(nullptr);
  if (stats) {
    json skips = json::object();
    for (const auto& [task, reasons] : stats->skips) {
      json r = json::object();
      for (const auto& [reason, n] : reasons) r[std::string(dualforge::ToString(reason))] = n;
      skips[std::string(dualforge::ToString(task))] = r;
    }
    json pools = json::object();
    for (const auto& [task, n] : stats->pool_sizes) {
      pools[std::string(dualforge::ToString(task))] = n;
    }
    json repeats = json::object();
    for (const auto& [task, n] : stats->repeats) {
      repeats[std::string(dualforge::ToString(task))] = n;
    }
    out["skips"] = skips;
    out["pool_sizes"] = pools;
    out["repeats"] = repeats;
  }
  return out;
}

TrainingManifest WriteTrainingFile(const std::vector<TrainingExample>& examples,
                                   const std::filesystem::path& path,
                                   const std::optional<MixSpec>& spec,
                                   const std::optional<MixStats>& stats) {
  TrainingManifest manifest;
  manifest.path = path;
  manifest.counts = {{TaskKind::kBase, 0}, {TaskKind::kIrsp, 0}, {TaskKind::kIr, 0}};
  manifest.spec = spec;
  manifest.stats = stats;
  for (const auto& ex : examples) {
    if (ex.response_span.end != text::ScalarLength(ex.full_text) ||
        ex.response_span.start >= ex.response_span.end) {
      throw DataError("example " + ex.id + ": response span does not cover the tail");
    }
    ++manifest.counts[ex.task];
  }
  jsonl::Writer out(path);
  out.Write({{"_schema", kTrainingSchema}, {"offset_unit", "scalar"}});
  for (const auto& ex : examples) {
    out.Write({{"id", ex.id},
               {"task", ToString(ex.task)},
               {"text", ex.full_text},
               {"response_start", ex.response_span.start},
               {"response_end", ex.response_span.end},
               {"meta", ex.meta}});
  }
  out.Flush();
  return manifest;
}

std::vector<TrainingExample> ReadTrainingFile(const std::filesystem::path& path) {
  std::vector<TrainingExample> out;
  jsonl::ForEachLine(path, [&](std::size_t line_no, const json& j) {
    if (line_no == 1) {
      if (j.value("_schema", "") != kTrainingSchema ||
          j.value("offset_unit", "") != "scalar") {
        throw DataError("missing dualforge-train-v1 header record");
      }
      return;
    }
    TrainingExample ex;
    ex.id = j.at("id").get<std::string>();
    ex.task = ParseTaskKind(j.at("task").get<std::string>());
    ex.full_text = j.at("text").get<std::string>();
    ex.response_span = {j.at("response_start").get<std::size_t>(),
                        j.at("response_end").get<std::size_t>()};
    ex.meta = j.at("meta");
    out.push_back(std::move(ex));
  });
  return out;
}

std::vector<MixSpec> SweepGrid(const std::vector<double>& ratios,
                               const std::vector<double>& masks, TaskKind task,
                               const MixSpec& base_spec) {
  if (task == TaskKind::kBase) throw UsageError("sweeps apply to irsp or ir");
  if (ratios.empty() || masks.empty()) throw UsageError("sweep lists must be non-empty");
  for (const auto* list : {&ratios, &masks}) {
    for (double v : *list) {
      if (!(v > 0.0 && v < 1.0)) {
        throw DataError("sweep value outside (0,1): " + std::to_string(v));
      }
    }
  }
  std::vector<MixSpec> out;
  for (double r : ratios) {
    for (double m : masks) {
      MixSpec spec = base_spec;
      if (task == TaskKind::kIrsp) {
        spec.r_task_irsp = r;
        spec.r_task_ir = 0.0;
        spec.irsp_policy.r_mask = m;
      } else {
        spec.r_task_ir = r;
        spec.r_task_irsp = 0.0;
        spec.ir_policy.r_mask = m;
      }
      out.push_back(spec);
    }
  }
  return out;
}

std::vector<MixSpec> SweepGrid(TaskKind task, const MixSpec& base_spec) {
  return SweepGrid(kDefaultSweepRatios, kDefaultSweepMasks, task, base_spec);
}

}  // namespace dualforge
