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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace dualforge {

enum class FailureReason { kException, kTimeout, kEmptyOutput, kNonzeroExit };

std::string_view ToString(FailureReason reason);
FailureReason ParseFailureReason(std::string_view s);

struct ExecValue {
  std::string text;
  bool operator==(const ExecValue&) const = default;
};

struct ExecFailure {
  FailureReason reason = FailureReason::kException;
  std::string detail;
  bool operator==(const ExecFailure&) const = default;
};

using ExecResult = std::variant<ExecValue, ExecFailure>;

inline bool IsValue(const ExecResult& r) { return std::holds_alternative<ExecValue>(r); }

// {"status": "value", "value": ...} or {"status": <reason>, "detail": ...}.
nlohmann::json ToJson(const ExecResult& r);
ExecResult ExecResultFromJson(const nlohmann::json& j);

// Runs one program-of-thought. Implementations must be safe to call from
// several threads at once.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecResult Execute(const std::string& program) const = 0;
};

// In-process interpreter for a small arithmetic subset of Python:
// assignments, print(...), + - * / // % **, unary minus, parentheses,
// abs/min/max/round/int/float and math.sqrt/floor/ceil. `import` lines are
// ignored. Anything else fails with kException. The value is the last
// non-empty printed line, or the value of a trailing bare expression when
// nothing was printed.
class MockExecutor final : public Executor {
 public:
  ExecResult Execute(const std::string& program) const override;
};

struct SandboxOptions {
  // argv of the runner; one JSON request on stdin, one JSON response on
  // stdout.
  std::vector<std::string> command = {"python3", "-m", "dualforge_sandbox"};
  std::chrono::duration<double> timeout{10.0};
  // Wall-clock allowance beyond `timeout` before the runner is killed.
  std::chrono::duration<double> grace{2.0};
};

// Launches one runner process per Execute call. Throws LaunchError when the
// runner cannot be started; program failures are returned as ExecFailure.
class SandboxExecutor final : public Executor {
 public:
  explicit SandboxExecutor(SandboxOptions options = {});
  ExecResult Execute(const std::string& program) const override;

  const SandboxOptions& options() const { return options_; }

 private:
  SandboxOptions options_;
};

struct ProcessResult {
  int exit_code = 0;
  bool signaled = false;
  bool timed_out = false;
  std::string out;
  std::string err;
};

// fork/exec with piped stdio; kills the child at the deadline. Throws
// LaunchError if argv[0] cannot be executed.
ProcessResult RunProcess(const std::vector<std::string>& argv, std::string_view input,
                         std::chrono::duration<double> deadline);

}  // namespace dualforge
