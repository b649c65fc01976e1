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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dualforge/corpus.h"
#include "dualforge/error.h"
#include "dualforge/executor.h"
#include "dualforge/model_client.h"

namespace dualforge::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "dualforge-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

// Random word-problem-like records. Sentences mix numerals, number words,
// decimals, thousands separators and some non-ASCII text so segmentation and
// span arithmetic see the awkward cases.
class RecordFactory {
 public:
  explicit RecordFactory(std::uint64_t seed) : gen_(seed) {}

  std::size_t Uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
  }

  std::string Word() {
    static const std::vector<std::string> kWords = {
        "Janet", "ducks", "lay", "eggs", "per", "day", "she", "sells", "the", "rest",
        "at", "market", "for", "each", "train", "leaves", "station", "café", "naïve",
        "apples", "boxes", "price", "total", "miles", "hours", "costs", "€5", "25%",
        "3.5", "1,200", "twelve", "half", "twice", "seven", "42", "0.75", "日本"};
    return kWords[Uniform(0, kWords.size() - 1)];
  }

  std::string Words(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += Word();
    }
    return s;
  }

  std::string Sentence(char end = '.') {
    std::string s = Words(Uniform(2, 6));
    if (Uniform(0, 2) == 0) s += ", " + Words(Uniform(1, 5));
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    s += end;
    return s;
  }

  std::string Instruction() {
    std::string s;
    const std::size_t n = Uniform(1, 4);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += Uniform(0, 3) == 0 ? "  " : " ";
      s += Sentence();
    }
    if (Uniform(0, 3) != 0) s += " How many " + Words(Uniform(1, 4)) + "?";
    return s;
  }

  std::string CotResponse() {
    std::string s;
    const std::size_t n = Uniform(1, 6);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) {
        const std::size_t sep = Uniform(0, 3);
        s += sep == 0 ? "\n" : sep == 1 ? "\n\n" : " ";
      }
      s += Sentence(Uniform(0, 5) == 0 ? '!' : '.');
    }
    s += " The answer is " + std::to_string(Uniform(0, 999)) + ".";
    return s;
  }

  std::string PotResponse() {
    std::string s;
    const std::size_t n = Uniform(1, 6);
    for (std::size_t i = 0; i < n; ++i) {
      s += "v" + std::to_string(i) + " = " + std::to_string(Uniform(1, 99)) + " * " +
           std::to_string(Uniform(1, 9)) + "\n";
      if (Uniform(0, 3) == 0) s += "\n";
    }
    s += "print(v0)";
    return s;
  }

  SourceRecord Record(std::size_t index) {
    SourceRecord r;
    r.id = "rec-" + std::to_string(index);
    r.source = Uniform(0, 1) ? "gsm8k" : "aqua";
    r.instruction = Instruction();
    r.thought_kind = Uniform(0, 3) == 0 ? ThoughtKind::kPoT : ThoughtKind::kCoT;
    r.response = r.thought_kind == ThoughtKind::kCoT ? CotResponse() : PotResponse();
    return r;
  }

  std::vector<SourceRecord> Records(std::size_t n) {
    std::vector<SourceRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(Record(i));
    return out;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Replies keyed by exact prompt. Unknown prompts are a transport failure so
// a test notices any prompt it did not anticipate.
class ScriptedClient final : public ModelClient {
 public:
  static constexpr const char* kFail = "\x01transport-failure";

  void Script(std::string prompt, std::string reply) {
    replies_[std::move(prompt)] = std::move(reply);
  }

  std::string Generate(const GenerationRequest& request) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      calls_.push_back(request.prompt);
    }
    auto it = replies_.find(request.prompt);
    if (it == replies_.end()) throw TransportError("unscripted prompt: " + request.prompt);
    if (it->second == kFail) throw TransportError("scripted failure");
    return it->second;
  }

  std::vector<std::string> calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
  }

 private:
  std::map<std::string, std::string> replies_;
  mutable std::mutex mu_;
  mutable std::vector<std::string> calls_;
};

// Literal prompts as a model sees them, written out independently of the
// serializer.
inline std::string ExpectedPrompt(const std::string& instruction) {
  return "Below is an instruction that describes a task. Write a response that "
         "appropriately completes the request.\n\n### Human: " +
         instruction + "\n\n### Assistant: ";
}

inline std::string ExpectedPotPrompt(const std::string& question) {
  return ExpectedPrompt(question + " Let's write a program.");
}

}  // namespace dualforge::testing
