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

#include "dualforge/cli.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "dualforge/config.h"
#include "dualforge/corpus.h"
#include "dualforge/error.h"
#include "dualforge/evalreport.h"
#include "dualforge/inference.h"
#include "dualforge/jsonl.h"
#include "dualforge/masker.h"
#include "dualforge/mixer.h"
#include "dualforge/text.h"

namespace dualforge::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

Config LoadConfig(const GlobalFlags& g) {
  Config c = g.config_path.empty() ? Config{} : Config::Load(g.config_path);
  if (g.seed) {
    c.mix.shuffle_seed = *g.seed;
    c.mix.irsp_policy.seed = *g.seed;
    c.mix.ir_policy.seed = *g.seed;
  }
  return c;
}

TaskKind ParseAuxTask(const std::string& s) {
  const TaskKind t = ParseTaskKind(s);
  if (t == TaskKind::kBase) throw UsageError("--task must be irsp or ir");
  return t;
}

void WriteText(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error("cannot write " + out_path);
}

void WriteJsonFile(const nlohmann::json& j, const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << j.dump(2) << "\n";
  if (!f) throw Error("cannot write " + path.string());
}

std::vector<MaskedExample> ReadMaskedFile(const fs::path& path, TaskKind expected) {
  std::vector<MaskedExample> out;
  jsonl::ForEachLine(path, [&](std::size_t, const nlohmann::json& j) {
    MaskedExample ex = MaskedExampleFromJson(j);
    if (ex.task != expected) {
      throw DataError("expected " + std::string(ToString(expected)) + " examples");
    }
    out.push_back(std::move(ex));
  });
  return out;
}

// --- build-data ------------------------------------------------------------

struct BuildFlags {
  std::string corpus;
  std::string task;
  std::optional<double> r_mask;
  std::string out;
};

int CmdBuildData(const GlobalFlags& g, const BuildFlags& f, std::ostream& out) {
  Config cfg = LoadConfig(g);
  const TaskKind task = ParseAuxTask(f.task);
  MaskPolicy policy = task == TaskKind::kIrsp ? cfg.mix.irsp_policy : cfg.mix.ir_policy;
  if (f.r_mask) policy.r_mask = *f.r_mask;
  policy.Validate();

  const Corpus corpus = LoadCorpus(f.corpus);
  std::map<SkipReason, std::size_t> skips;
  std::vector<MaskedExample> built;
  for (const auto& r : corpus.records) {
    BuildResult res = BuildMaskedExample(task, r, policy, cfg.masker, r.id);
    if (auto* ex = std::get_if<MaskedExample>(&res)) {
      built.push_back(std::move(*ex));
    } else {
      ++skips[std::get<Skip>(res).reason];
    }
  }
  out << "task=" << ToString(task) << " r_mask=" << text::FormatNumber(policy.r_mask)
      << " seed=" << policy.seed << "\n";
  std::size_t skipped = 0;
  for (const auto& [reason, n] : skips) skipped += n;
  out << "built=" << built.size() << " skipped=" << skipped << "\n";
  for (const auto& [reason, n] : skips) out << "  skipped." << ToString(reason) << "=" << n << "\n";
  if (built.empty()) {
    throw DataError("task " + std::string(ToString(task)) + ": zero maskable records in " +
                    f.corpus);
  }
  jsonl::Writer w(f.out);
  for (const auto& ex : built) w.Write(ToJson(ex));
  w.Flush();
  return 0;
}

// --- mix -------------------------------------------------------------------

struct MixFlags {
  std::string corpus;
  std::string irsp_file;
  std::string ir_file;
  std::string task;
  std::optional<double> r_task;
  std::optional<double> r_mask;
  std::optional<double> r_task_irsp;
  std::optional<double> r_task_ir;
  std::string semantics;
  std::string out;
};

int CmdMix(const GlobalFlags& g, const MixFlags& f, std::ostream& out) {
  Config cfg = LoadConfig(g);
  MixSpec& spec = cfg.mix;
  if (f.r_task_irsp) spec.r_task_irsp = *f.r_task_irsp;
  if (f.r_task_ir) spec.r_task_ir = *f.r_task_ir;
  if ((f.r_task || f.r_mask) && f.task.empty()) {
    throw UsageError("--r-task/--r-mask need --task irsp|ir");
  }
  if (!f.task.empty()) {
    const TaskKind task = ParseAuxTask(f.task);
    if (f.r_task) (task == TaskKind::kIrsp ? spec.r_task_irsp : spec.r_task_ir) = *f.r_task;
    if (f.r_mask) {
      (task == TaskKind::kIrsp ? spec.irsp_policy : spec.ir_policy).r_mask = *f.r_mask;
    }
  }
  if (!f.semantics.empty()) spec.semantics = ParseRatioSemantics(f.semantics);
  spec.Validate();

  const Corpus corpus = LoadCorpus(f.corpus);
  MaskedPools pools;
  if (!f.irsp_file.empty()) pools.irsp = ReadMaskedFile(f.irsp_file, TaskKind::kIrsp);
  if (!f.ir_file.empty()) pools.ir = ReadMaskedFile(f.ir_file, TaskKind::kIr);

  Mixture mix = AssembleMixture(corpus.records, spec, cfg.masker, cfg.serialize, pools);
  TrainingManifest manifest = WriteTrainingFile(mix.examples, f.out, spec, mix.stats);
  WriteJsonFile(manifest.ToJson(), f.out + ".manifest.json");
  out << "base=" << manifest.counts[TaskKind::kBase]
      << " irsp=" << manifest.counts[TaskKind::kIrsp] << " ir=" << manifest.counts[TaskKind::kIr]
      << "\n";
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalFlags {
  std::string benchmark;
  std::string name;
  std::string endpoint;
  std::string executor;
  bool resume = false;
  std::optional<int> concurrency;
  std::string out;
};

int CmdEval(const GlobalFlags& g, const EvalFlags& f, std::ostream& out, std::ostream& err) {
  Config cfg = LoadConfig(g);
  if (!f.endpoint.empty()) {
    cfg.endpoint.endpoint = f.endpoint;
  } else if (const char* env = std::getenv("DUALFORGE_ENDPOINT"); env && *env) {
    cfg.endpoint.endpoint = env;
  }
  if (cfg.endpoint.endpoint.empty()) {
    throw UsageError("no endpoint: pass --endpoint or set DUALFORGE_ENDPOINT");
  }
  if (const char* key = std::getenv("DUALFORGE_API_KEY"); key && *key) cfg.endpoint.api_key = key;
  if (!f.executor.empty()) cfg.executor = ParseExecutorKind(f.executor);
  if (f.concurrency) cfg.concurrency = *f.concurrency;
  if (cfg.concurrency < 1) throw UsageError("--concurrency must be >= 1");

  const std::vector<BenchmarkItem> items =
      LoadBenchmark(f.benchmark, f.name.empty() ? fs::path(f.benchmark).stem().string() : f.name);
  std::set<std::string> already;
  if (f.resume) {
    already = PrepareResume(f.out);
  } else if (fs::exists(f.out)) {
    throw UsageError(f.out + " exists; pass --resume to continue it");
  }
  std::vector<BenchmarkItem> todo;
  for (const auto& item : items) {
    if (!already.count(item.id)) todo.push_back(item);
  }

  const HttpModelClient client(cfg.endpoint);
  std::unique_ptr<Executor> executor;
  if (cfg.executor == ExecutorKind::kMock) {
    executor = std::make_unique<MockExecutor>();
  } else {
    executor = std::make_unique<SandboxExecutor>(cfg.sandbox);
  }

  jsonl::Writer w(f.out, jsonl::Writer::Mode::kAppend);
  std::size_t written = 0;
  RunItems(todo, client, *executor, cfg.inference, cfg.concurrency,
           [&](const InferenceOutcome& o) {
             w.Write(ToJson(o));
             w.Flush();
             ++written;
           });
  out << "evaluated=" << written << " skipped_existing=" << items.size() - todo.size() << "\n";
  (void)err;
  return 0;
}

// --- score / compare -------------------------------------------------------

struct ScoreFlags {
  std::string benchmark;
  std::string name;
  std::vector<std::string> outcomes;
  std::vector<std::string> run_ids;
  std::string format = "markdown";
  std::string out;
};

std::string RunIdFor(const std::vector<std::string>& ids, std::size_t i, const std::string& path) {
  if (i < ids.size()) return ids[i];
  return fs::path(path).stem().string();
}

int CmdScore(const GlobalFlags& g, const ScoreFlags& f, std::ostream& out, std::ostream& err) {
  (void)LoadConfig(g);
  const ReportFormat format = ParseReportFormat(f.format);
  const auto items =
      LoadBenchmark(f.benchmark, f.name.empty() ? fs::path(f.benchmark).stem().string() : f.name);
  std::vector<RunRecord> records;
  for (std::size_t i = 0; i < f.outcomes.size(); ++i) {
    RunRecord r = ScoreRun(ReadOutcomeFile(f.outcomes[i]), items, RunIdFor(f.run_ids, i, f.outcomes[i]));
    for (const auto& w : r.warnings) err << "warning: " << r.run_id << ": " << w << "\n";
    records.push_back(std::move(r));
  }
  WriteText(RenderReport(records, format), f.out, out);
  return 0;
}

struct CompareFlags {
  std::string benchmark;
  std::string name;
  std::string baseline;
  std::string treatment;
  std::string gain_mode;
  std::string format = "markdown";
  std::string out;
};

int CmdCompare(const GlobalFlags& g, const CompareFlags& f, std::ostream& out, std::ostream& err) {
  Config cfg = LoadConfig(g);
  if (!f.gain_mode.empty()) {
    if (f.gain_mode == "fixed_fraction") {
      cfg.gain_mode = GainMode::kFixedFraction;
    } else if (f.gain_mode == "net_reduction") {
      cfg.gain_mode = GainMode::kNetReduction;
    } else {
      throw UsageError("--gain-mode must be fixed_fraction or net_reduction");
    }
  }
  const ReportFormat format = ParseReportFormat(f.format);
  const auto items =
      LoadBenchmark(f.benchmark, f.name.empty() ? fs::path(f.benchmark).stem().string() : f.name);
  RunRecord base = ScoreRun(ReadOutcomeFile(f.baseline), items, fs::path(f.baseline).stem().string());
  RunRecord treat =
      ScoreRun(ReadOutcomeFile(f.treatment), items, fs::path(f.treatment).stem().string());
  for (const auto* r : {&base, &treat}) {
    for (const auto& w : r->warnings) err << "warning: " << r->run_id << ": " << w << "\n";
  }
  WriteText(RenderGainReport(CompareErrorGain(base, treat, cfg.gain_mode), format), f.out, out);
  return 0;
}

// --- sweep -----------------------------------------------------------------

struct SweepFlags {
  std::string task = "irsp";
  std::vector<double> ratios;
  std::vector<double> masks;
  std::string out;
};

int CmdSweep(const GlobalFlags& g, const SweepFlags& f, std::ostream& out) {
  Config cfg = LoadConfig(g);
  const TaskKind task = ParseAuxTask(f.task);
  const auto specs = SweepGrid(f.ratios.empty() ? kDefaultSweepRatios : f.ratios,
                               f.masks.empty() ? kDefaultSweepMasks : f.masks, task, cfg.mix);
  fs::create_directories(f.out);
  for (const auto& spec : specs) {
    Config c = cfg;
    c.mix = spec;
    const double r = task == TaskKind::kIrsp ? spec.r_task_irsp : spec.r_task_ir;
    const double m = task == TaskKind::kIrsp ? spec.irsp_policy.r_mask : spec.ir_policy.r_mask;
    const fs::path path = fs::path(f.out) / (std::string(ToString(task)) + "_rtask" +
                                             text::FormatNumber(r) + "_rmask" +
                                             text::FormatNumber(m) + ".toml");
    WriteText(c.ToToml(), path.string(), out);
    out << path.string() << "\n";
  }
  return 0;
}

int Dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dualforge: dual-task instruction data builder and math evaluation harness"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  GlobalFlags g;
  app.add_option("--config", g.config_path, "TOML config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed for masking and shuffling (overrides config)");
  app.fallthrough();

  BuildFlags bf;
  auto* build = app.add_subcommand("build-data", "Build IRSP or IR masked examples from a corpus");
  build->add_option("--corpus", bf.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  build->add_option("--task", bf.task, "irsp or ir")->required();
  build->add_option("--r-mask", bf.r_mask, "Mask ratio in (0,1)");
  build->add_option("--out", bf.out, "Output masked-example JSONL")->required();

  MixFlags mf;
  auto* mix = app.add_subcommand("mix", "Assemble and serialize a multi-task training mixture");
  mix->add_option("--corpus", mf.corpus, "Base corpus JSONL")->required()->check(CLI::ExistingFile);
  mix->add_option("--irsp", mf.irsp_file, "Prebuilt IRSP examples (optional)")
      ->check(CLI::ExistingFile);
  mix->add_option("--ir", mf.ir_file, "Prebuilt IR examples (optional)")->check(CLI::ExistingFile);
  mix->add_option("--task", mf.task, "Task that --r-task/--r-mask apply to (irsp|ir)");
  mix->add_option("--r-task", mf.r_task, "Task ratio for --task");
  mix->add_option("--r-mask", mf.r_mask, "Mask ratio for --task");
  mix->add_option("--r-task-irsp", mf.r_task_irsp, "IRSP task ratio");
  mix->add_option("--r-task-ir", mf.r_task_ir, "IR task ratio");
  mix->add_option("--ratio-semantics", mf.semantics, "relative or share");
  mix->add_option("--out", mf.out, "Output training JSONL")->required();

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Run the PoT/CoT inference protocol over a benchmark");
  eval->add_option("--benchmark", ef.benchmark, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--name", ef.name, "Benchmark name (default: file stem)");
  eval->add_option("--endpoint", ef.endpoint, "Model endpoint URL (or DUALFORGE_ENDPOINT)");
  eval->add_option("--executor", ef.executor, "Program executor")
      ->check(CLI::IsMember({"sandbox", "mock"}));
  eval->add_flag("--resume", ef.resume, "Skip items already in --out and append");
  eval->add_option("--concurrency", ef.concurrency, "Parallel items");
  eval->add_option("--out", ef.out, "Outcome JSONL")->required();

  ScoreFlags sf;
  auto* score = app.add_subcommand("score", "Score outcome files into an accuracy table");
  score->add_option("--benchmark", sf.benchmark, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("--name", sf.name, "Benchmark name (default: file stem)");
  score->add_option("--outcomes", sf.outcomes, "Outcome JSONL (repeatable)")->required();
  score->add_option("--run-id", sf.run_ids, "Run id per outcome file (default: file stem)");
  score->add_option("--format", sf.format, "markdown or csv");
  score->add_option("--out", sf.out, "Write the report here instead of stdout");

  CompareFlags cf;
  auto* compare = app.add_subcommand("compare", "Error-sample gain of a treatment run over a baseline");
  compare->add_option("--benchmark", cf.benchmark, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  compare->add_option("--name", cf.name, "Benchmark name (default: file stem)");
  compare->add_option("--baseline", cf.baseline, "Baseline outcome JSONL")->required();
  compare->add_option("--treatment", cf.treatment, "Treatment outcome JSONL")->required();
  compare->add_option("--gain-mode", cf.gain_mode, "fixed_fraction or net_reduction");
  compare->add_option("--format", cf.format, "markdown or csv");
  compare->add_option("--out", cf.out, "Write the report here instead of stdout");

  SweepFlags wf;
  auto* sweep = app.add_subcommand("sweep", "Write one config file per (r_task, r_mask) grid point");
  sweep->add_option("--task", wf.task, "irsp or ir");
  sweep->add_option("--r-task", wf.ratios, "Task ratios (default 0.2 0.4 0.6 0.8)");
  sweep->add_option("--r-mask", wf.masks, "Mask ratios (default 0.15 0.4 0.6 0.8)");
  sweep->add_option("--out", wf.out, "Output directory")->required();

  std::string cfg_out;
  auto* show = app.add_subcommand("config", "Print the effective configuration as TOML");
  show->add_option("--out", cfg_out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.back()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (build->parsed()) return CmdBuildData(g, bf, out);
  if (mix->parsed()) return CmdMix(g, mf, out);
  if (eval->parsed()) return CmdEval(g, ef, out, err);
  if (score->parsed()) return CmdScore(g, sf, out, err);
  if (compare->parsed()) return CmdCompare(g, cf, out, err);
  if (sweep->parsed()) return CmdSweep(g, wf, out);
  if (show->parsed()) {
    WriteText(LoadConfig(g).ToToml(), cfg_out, out);
    return 0;
  }
  return 1;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return Dispatch(argc, argv, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << "\n";
    return 3;
  } catch (const LaunchError& e) {
    err << "executor launch error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace dualforge::cli
