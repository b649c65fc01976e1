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

#include "dualforge/evalreport.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "dualforge/error.h"
#include "dualforge/text.h"

namespace dualforge {

double AccuracyPercent(std::size_t correct, std::size_t total) {
  if (total == 0) throw DataError("accuracy over zero items");
  const std::size_t scaled = correct * 1000;
  std::size_t tenths = scaled / total;
  const std::size_t rem = scaled % total;
  if (2 * rem > total || (2 * rem == total && tenths % 2 == 1)) ++tenths;
  return static_cast<double>(tenths) / 10.0;
}

std::size_t RunRecord::correct() const {
  return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(),
                                                [](const ScoredOutcome& o) { return o.correct; }));
}

double RunRecord::accuracy() const { return AccuracyPercent(correct(), total()); }

std::map<OutcomePath, std::size_t> RunRecord::PathCounts() const {
  std::map<OutcomePath, std::size_t> counts;
  for (OutcomePath p : kAllPaths) counts[p] = 0;
  for (const auto& o : outcomes) ++counts[o.path];
  return counts;
}

RunRecord ScoreRun(const std::vector<InferenceOutcome>& outcomes,
                   const std::vector<BenchmarkItem>& benchmark, std::string run_id) {
  if (benchmark.empty()) throw DataError("cannot score against an empty benchmark");
  std::unordered_map<std::string_view, const InferenceOutcome*> by_id;
  std::unordered_map<std::string_view, const BenchmarkItem*> items;
  for (const auto& item : benchmark) items.emplace(item.id, &item);
  for (const auto& o : outcomes) {
    if (!items.count(o.item_id)) {
      throw DataError("outcome for unknown item_id \"" + o.item_id + "\"");
    }
    if (!by_id.emplace(o.item_id, &o).second) {
      throw DataError("repeated outcome for item_id \"" + o.item_id + "\"");
    }
  }

  RunRecord record;
  record.run_id = std::move(run_id);
  record.benchmark = benchmark.front().benchmark;
  for (const auto& item : benchmark) {
    ScoredOutcome scored;
    scored.item_id = item.id;
    scored.gold = item.gold;
    auto it = by_id.find(item.id);
    if (it == by_id.end()) {
      record.warnings.push_back("no outcome for item " + item.id + "; scored incorrect");
      record.outcomes.push_back(std::move(scored));
      continue;
    }
    const InferenceOutcome& o = *it->second;
    scored.path = o.path;
    if (item.answer_form == AnswerForm::kMultipleChoice) {
      if (o.chosen_label) scored.answer = std::string(1, *o.chosen_label);
      scored.correct = o.chosen_label && item.gold.size() == 1 && *o.chosen_label == item.gold[0];
    } else {
      scored.answer = o.resolved_answer;
      scored.correct = o.resolved_answer && AnswersEqual(*o.resolved_answer, item.gold);
    }
    if (o.path == OutcomePath::kUnresolved) scored.correct = false;
    record.outcomes.push_back(std::move(scored));
  }
  return record;
}

ErrorGainReport CompareErrorGain(const RunRecord& baseline, const RunRecord& treatment,
                                 GainMode mode) {
  if (baseline.benchmark != treatment.benchmark) {
    throw DataError("runs cover different benchmarks: " + baseline.benchmark + " vs " +
                    treatment.benchmark);
  }
  std::map<std::string_view, bool> base_ok;
  std::map<std::string_view, bool> treat_ok;
  for (const auto& o : baseline.outcomes) base_ok[o.item_id] = o.correct;
  for (const auto& o : treatment.outcomes) treat_ok[o.item_id] = o.correct;

  std::vector<std::string> only_base;
  std::vector<std::string> only_treat;
  for (const auto& [id, ok] : base_ok) {
    if (!treat_ok.count(id)) only_base.emplace_back(id);
  }
  for (const auto& [id, ok] : treat_ok) {
    if (!base_ok.count(id)) only_treat.emplace_back(id);
  }
  if (!only_base.empty() || !only_treat.empty()) {
    throw DataError("item universes differ; only in baseline: [" + text::Join(only_base, ", ") +
                    "], only in treatment: [" + text::Join(only_treat, ", ") + "]");
  }

  ErrorGainReport report;
  report.baseline_run_id = baseline.run_id;
  report.treatment_run_id = treatment.run_id;
  report.mode = mode;
  for (const auto& [id, ok] : base_ok) {
    if (!treat_ok[id]) ++report.treatment_error_count;
    if (ok) continue;
    ++report.baseline_error_count;
    if (treat_ok[id]) ++report.fixed_count;
  }
  if (report.baseline_error_count > 0) {
    const auto denom = static_cast<double>(report.baseline_error_count);
    if (mode == GainMode::kFixedFraction) {
      report.gain = static_cast<double>(report.fixed_count) / denom;
    } else {
      report.gain = (denom - static_cast<double>(report.treatment_error_count)) / denom;
    }
  }
  return report;
}

ReportFormat ParseReportFormat(std::string_view s) {
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  if (s == "csv") return ReportFormat::kCsv;
  throw UsageError("unknown report format \"" + std::string(s) + "\"");
}

namespace {

std::string OneDecimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  return "\"" + text::ReplaceAll(s, "\"", "\"\"") + "\"";
}

std::string Emit(const std::vector<std::vector<std::string>>& rows, ReportFormat format) {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (format == ReportFormat::kCsv) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        out << (c ? "," : "") << CsvField(rows[r][c]);
      }
      out << "\n";
      continue;
    }
    out << "|";
    for (const auto& cell : rows[r]) out << " " << text::ReplaceAll(cell, "|", "\\|") << " |";
    out << "\n";
    if (r == 0) {
      out << "|";
      for (std::size_t c = 0; c < rows[r].size(); ++c) out << (c < 2 ? " --- |" : " ---: |");
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

std::string RenderReport(std::vector<RunRecord> records, ReportFormat format) {
  if (records.empty()) throw DataError("nothing to report");
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.run_id, a.benchmark) < std::tie(b.run_id, b.benchmark);
  });
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"run", "benchmark", "n", "correct", "accuracy"};
  for (OutcomePath p : kAllPaths) header.emplace_back(ToString(p));
  rows.push_back(header);
  for (const auto& r : records) {
    std::vector<std::string> row = {r.run_id, r.benchmark, std::to_string(r.total()),
                                    std::to_string(r.correct()), OneDecimal(r.accuracy())};
    for (const auto& [path, n] : r.PathCounts()) row.push_back(std::to_string(n));
    rows.push_back(std::move(row));
  }
  return Emit(rows, format);
}

std::string RenderGainReport(const ErrorGainReport& report, ReportFormat format) {
  char gain[32];
  std::snprintf(gain, sizeof(gain), "%.3f", report.gain);
  std::vector<std::vector<std::string>> rows = {
      {"baseline", "treatment", "baseline_errors", "fixed", "treatment_errors", "gain", "mode"},
      {report.baseline_run_id, report.treatment_run_id,
       std::to_string(report.baseline_error_count), std::to_string(report.fixed_count),
       std::to_string(report.treatment_error_count), gain,
       report.mode == GainMode::kFixedFraction ? "fixed_fraction" : "net_reduction"}};
  return Emit(rows, format);
}

}  // namespace dualforge
