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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dualforge/corpus.h"
#include "dualforge/inference.h"

namespace dualforge {

struct ScoredOutcome {
  std::string item_id;
  std::optional<std::string> answer;  // resolved answer, or the chosen label
  std::string gold;
  bool correct = false;
  OutcomePath path = OutcomePath::kUnresolved;

  bool operator==(const ScoredOutcome&) const = default;
};

struct RunRecord {
  std::string run_id;
  std::string benchmark;
  std::vector<ScoredOutcome> outcomes;  // benchmark item order
  std::vector<std::string> warnings;

  std::size_t total() const { return outcomes.size(); }
  std::size_t correct() const;
  // Percent rounded half-to-even to one decimal, e.g. 75.0.
  double accuracy() const;
  std::map<OutcomePath, std::size_t> PathCounts() const;

  bool operator==(const RunRecord&) const = default;
};

// Multiple choice: label equality. Open: normalized answer comparison.
// Benchmark items without an outcome score incorrect (with a warning).
// Throws DataError for an empty benchmark, an outcome whose item_id is not
// in the benchmark, or a repeated outcome id.
RunRecord ScoreRun(const std::vector<InferenceOutcome>& outcomes,
                   const std::vector<BenchmarkItem>& benchmark, std::string run_id);

// One-decimal percent of correct/total with round-half-to-even, exact.
double AccuracyPercent(std::size_t correct, std::size_t total);

enum class GainMode {
  kFixedFraction,   // fixed / baseline errors
  kNetReduction,    // (baseline errors - treatment errors) / baseline errors
};

struct ErrorGainReport {
  std::string baseline_run_id;
  std::string treatment_run_id;
  std::size_t baseline_error_count = 0;
  std::size_t fixed_count = 0;
  std::size_t treatment_error_count = 0;
  GainMode mode = GainMode::kFixedFraction;
  // 0 when the baseline has no errors.
  double gain = 0.0;
};

// Throws DataError when the benchmarks differ or the item universes differ
// (the message lists the symmetric difference).
ErrorGainReport CompareErrorGain(const RunRecord& baseline, const RunRecord& treatment,
                                 GainMode mode = GainMode::kFixedFraction);

enum class ReportFormat { kMarkdown, kCsv };

ReportFormat ParseReportFormat(std::string_view s);

// Columns: run, benchmark, n, correct, accuracy, then one count per outcome
// path. Rows sorted by (run, benchmark).
std::string RenderReport(std::vector<RunRecord> records, ReportFormat format);

std::string RenderGainReport(const ErrorGainReport& report, ReportFormat format);

}  // namespace dualforge
