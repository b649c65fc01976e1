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

#include "dualforge/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dualforge/error.h"
#include "dualforge/template.h"
#include "dualforge/text.h"

namespace dualforge {

using nlohmann::json;

namespace {

class TomlLine {
 public:
  TomlLine(std::string_view s, std::size_t line_no) : s_(s), line_no_(line_no) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw UsageError("config line " + std::to_string(line_no_) + ": " + what);
  }

  void SkipSpace() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool AtEnd() {
    SkipSpace();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  char Peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool Accept(char c) {
    SkipSpace();
    if (Peek() != c) return false;
    ++pos_;
    return true;
  }

  std::string Key() {
    SkipSpace();
    const std::size_t begin = pos_;
    while (pos_ < s_.size() && (text::IsAlnum(s_[pos_]) || s_[pos_] == '_' || s_[pos_] == '-')) ++pos_;
    if (begin == pos_) Fail("expected a key");
    return std::string(s_.substr(begin, pos_ - begin));
  }

  json Value() {
    SkipSpace();
    const char c = Peek();
    if (c == '"') return BasicString();
    if (c == '\'') return LiteralString();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      SkipSpace();
      if (Accept(']')) return arr;
      do {
        arr.push_back(Value());
      } while (Accept(','));
      if (!Accept(']')) Fail("unterminated array");
      return arr;
    }
    const std::size_t begin = pos_;
    while (pos_ < s_.size() && !text::IsSpace(s_[pos_]) && s_[pos_] != ',' && s_[pos_] != ']' &&
           s_[pos_] != '#') {
      ++pos_;
    }
    const std::string word = text::ReplaceAll(s_.substr(begin, pos_ - begin), "_", "");
    if (word == "true") return true;
    if (word == "false") return false;
    if (word.empty()) Fail("expected a value");
    const bool is_float = word.find_first_of(".eE") != std::string::npos || word == "inf" ||
                          word == "nan";
    const char* first = word.data() + (word.front() == '+' ? 1 : 0);
    const char* last = word.data() + word.size();
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last) Fail("bad number \"" + word + "\"");
      return d;
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || p != last) Fail("bad value \"" + word + "\"");
    return i;
  }

 private:
  json BasicString() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) Fail("dangling escape");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'u': {
          if (pos_ + 4 > s_.size()) Fail("short \\u escape");
          unsigned cp = 0;
          auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + 4, cp, 16);
          if (ec != std::errc() || p != s_.data() + pos_ + 4) Fail("bad \\u escape");
          pos_ += 4;
          if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
          } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
          } else {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
          }
          break;
        }
        default:
          Fail(std::string("unknown escape \\") + e);
      }
    }
    if (pos_ >= s_.size()) Fail("unterminated string");
    ++pos_;
    return out;
  }

  json LiteralString() {
    ++pos_;
    const std::size_t end = s_.find('\'', pos_);
    if (end == std::string_view::npos) Fail("unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

// Reads a typed value if present; wrong types are usage errors.
template <typename T>
void Read(const json& table, const char* key, T& out, const std::string& where) {
  auto it = table.find(key);
  if (it == table.end()) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw UsageError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw UsageError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->get<std::int64_t>() < 0) throw UsageError("");
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw UsageError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw UsageError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw UsageError("config " + where + "." + key + " has the wrong type");
  }
}

void RejectUnknown(const json& table, std::initializer_list<std::string_view> known,
                   const std::string& where) {
  for (const auto& [key, value] : table.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("unknown config key " + where + "." + key);
    }
  }
}

const json& Table(const json& root, const char* name) {
  static const json kEmpty = json::object();
  auto it = root.find(name);
  if (it == root.end()) return kEmpty;
  if (!it->is_object()) throw UsageError(std::string("config [") + name + "] must be a table");
  return *it;
}

void ReadPolicy(const json& t, MaskPolicy& p, const std::string& where) {
  Read(t, "r_mask", p.r_mask, where);
  Read(t, "min_masked", p.min_masked, where);
  Read(t, "min_revealed", p.min_revealed, where);
  Read(t, "seed", p.seed, where);
}

void RequirePlaceholders(const std::string& tmpl, std::vector<std::string> names,
                         const char* which) {
  PromptTemplate t(tmpl, names);
  for (const auto& n : names) {
    if (!t.Has(n)) throw DataError(std::string(which) + " template lacks {" + n + "}");
  }
}

std::string PolicyToml(const MaskPolicy& p) {
  std::ostringstream out;
  out << "r_mask = " << text::FormatNumber(p.r_mask) << "\n"
      << "min_masked = " << p.min_masked << "\n"
      << "min_revealed = " << p.min_revealed << "\n"
      << "seed = " << p.seed << "\n";
  return out.str();
}

std::string FloatToml(double v) {
  std::string s = text::FormatNumber(v);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

}  // namespace

json ParseToml(std::string_view source) {
  json root = json::object();
  json* current = &root;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= source.size()) {
    std::size_t end = source.find('\n', begin);
    if (end == std::string_view::npos) end = source.size();
    std::string_view raw = source.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    TomlLine line(raw, line_no);
    if (line.AtEnd()) continue;
    if (line.Accept('[')) {
      current = &root;
      do {
        const std::string name = line.Key();
        json& next = (*current)[name];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) line.Fail("\"" + name + "\" is not a table");
        current = &next;
      } while (line.Accept('.'));
      if (!line.Accept(']')) line.Fail("expected ']'");
      if (!line.AtEnd()) line.Fail("trailing characters after table header");
      continue;
    }
    const std::string key = line.Key();
    if (!line.Accept('=')) line.Fail("expected '=' after key");
    json value = line.Value();
    if (!line.AtEnd()) line.Fail("trailing characters after value");
    if (current->contains(key)) line.Fail("duplicate key \"" + key + "\"");
    (*current)[key] = std::move(value);
  }
  return root;
}

std::string TomlQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string_view ToString(ExecutorKind kind) {
  return kind == ExecutorKind::kSandbox ? "sandbox" : "mock";
}

ExecutorKind ParseExecutorKind(std::string_view s) {
  if (s == "sandbox") return ExecutorKind::kSandbox;
  if (s == "mock") return ExecutorKind::kMock;
  throw UsageError("unknown executor \"" + std::string(s) + "\" (sandbox|mock)");
}

void Config::Validate() const {
  RequirePlaceholders(serialize.serialization_template, {"instruction", "response"},
                      "serialization");
  if (!PromptTemplate(serialize.serialization_template, {"instruction", "response"})
           .EndsWith("response")) {
    throw DataError("serialization template must end with {response}");
  }
  RequirePlaceholders(masker.irsp_wrapper, {"instruction", "masked_thought"}, "irsp_wrapper");
  RequirePlaceholders(masker.ir_wrapper, {"response", "masked_instruction"}, "ir_wrapper");
  RequirePlaceholders(inference.closest_option_template, {"answer", "options"}, "closest_option");
  mix.Validate();
  if (concurrency < 1) throw DataError("eval.concurrency must be >= 1");
  if (inference.max_new < 1) throw DataError("generation.max_new must be >= 1");
  if (inference.temperature < 0) throw DataError("generation.temperature must be >= 0");
  if (sandbox.timeout.count() <= 0) throw DataError("executor.timeout_s must be positive");
  if (sandbox.command.empty()) throw DataError("executor.command must be non-empty");
}

Config Config::FromToml(std::string_view source) {
  const json root = ParseToml(source);
  RejectUnknown(root,
                {"templates", "mix", "mask", "executor", "endpoint", "generation", "eval",
                 "report", "training"},
                "");
  Config c;

  const json& tpl = Table(root, "templates");
  RejectUnknown(tpl, {"serialization", "irsp_wrapper", "ir_wrapper", "closest_option",
                      "program_suffix"},
                "templates");
  Read(tpl, "serialization", c.serialize.serialization_template, "templates");
  Read(tpl, "irsp_wrapper", c.masker.irsp_wrapper, "templates");
  Read(tpl, "ir_wrapper", c.masker.ir_wrapper, "templates");
  Read(tpl, "closest_option", c.inference.closest_option_template, "templates");
  Read(tpl, "program_suffix", c.inference.program_suffix, "templates");

  const json& mix = Table(root, "mix");
  RejectUnknown(mix, {"r_task_irsp", "r_task_ir", "shuffle_seed", "ratio_semantics"}, "mix");
  Read(mix, "r_task_irsp", c.mix.r_task_irsp, "mix");
  Read(mix, "r_task_ir", c.mix.r_task_ir, "mix");
  Read(mix, "shuffle_seed", c.mix.shuffle_seed, "mix");
  std::string semantics(ToString(c.mix.semantics));
  Read(mix, "ratio_semantics", semantics, "mix");
  c.mix.semantics = ParseRatioSemantics(semantics);

  const json& mask = Table(root, "mask");
  RejectUnknown(mask, {"irsp", "ir"}, "mask");
  const json& irsp = Table(mask, "irsp");
  RejectUnknown(irsp, {"r_mask", "min_masked", "min_revealed", "seed"}, "mask.irsp");
  ReadPolicy(irsp, c.mix.irsp_policy, "mask.irsp");
  const json& ir = Table(mask, "ir");
  RejectUnknown(ir, {"r_mask", "min_masked", "min_revealed", "seed", "questions_always_eligible"},
                "mask.ir");
  ReadPolicy(ir, c.mix.ir_policy, "mask.ir");
  Read(ir, "questions_always_eligible", c.masker.questions_always_eligible, "mask.ir");

  const json& exec = Table(root, "executor");
  RejectUnknown(exec, {"kind", "timeout_s", "command"}, "executor");
  std::string kind(ToString(c.executor));
  Read(exec, "kind", kind, "executor");
  c.executor = ParseExecutorKind(kind);
  double timeout = c.sandbox.timeout.count();
  Read(exec, "timeout_s", timeout, "executor");
  c.sandbox.timeout = std::chrono::duration<double>(timeout);
  if (auto it = exec.find("command"); it != exec.end()) {
    if (!it->is_array()) throw UsageError("config executor.command must be an array of strings");
    c.sandbox.command.clear();
    for (const auto& part : *it) {
      if (!part.is_string()) throw UsageError("config executor.command must be strings");
      c.sandbox.command.push_back(part.get<std::string>());
    }
  }

  const json& ep = Table(root, "endpoint");
  RejectUnknown(ep, {"url", "adapter", "timeout_s", "model", "retries"}, "endpoint");
  Read(ep, "url", c.endpoint.endpoint, "endpoint");
  std::string adapter = "raw";
  Read(ep, "adapter", adapter, "endpoint");
  if (adapter == "raw") {
    c.endpoint.adapter = EndpointAdapter::kRaw;
  } else if (adapter == "chat") {
    c.endpoint.adapter = EndpointAdapter::kChat;
  } else {
    throw UsageError("config endpoint.adapter must be raw or chat");
  }
  double ep_timeout = c.endpoint.timeout.count();
  Read(ep, "timeout_s", ep_timeout, "endpoint");
  c.endpoint.timeout = std::chrono::duration<double>(ep_timeout);
  Read(ep, "model", c.endpoint.model, "endpoint");
  Read(ep, "retries", c.endpoint.retries, "endpoint");

  const json& gen = Table(root, "generation");
  RejectUnknown(gen, {"max_new", "temperature", "stop"}, "generation");
  Read(gen, "max_new", c.inference.max_new, "generation");
  Read(gen, "temperature", c.inference.temperature, "generation");
  if (auto it = gen.find("stop"); it != gen.end()) {
    if (!it->is_array()) throw UsageError("config generation.stop must be an array");
    c.inference.stop = it->get<std::vector<std::string>>();
  }

  const json& ev = Table(root, "eval");
  RejectUnknown(ev, {"concurrency", "closest_option_mode"}, "eval");
  Read(ev, "concurrency", c.concurrency, "eval");
  std::string mode = "local";
  Read(ev, "closest_option_mode", mode, "eval");
  if (mode == "local") {
    c.inference.closest_mode = ClosestOptionMode::kLocal;
  } else if (mode == "model") {
    c.inference.closest_mode = ClosestOptionMode::kModel;
  } else {
    throw UsageError("config eval.closest_option_mode must be local or model");
  }

  const json& rep = Table(root, "report");
  RejectUnknown(rep, {"gain_mode"}, "report");
  std::string gain = "fixed_fraction";
  Read(rep, "gain_mode", gain, "report");
  if (gain == "fixed_fraction") {
    c.gain_mode = GainMode::kFixedFraction;
  } else if (gain == "net_reduction") {
    c.gain_mode = GainMode::kNetReduction;
  } else {
    throw UsageError("config report.gain_mode must be fixed_fraction or net_reduction");
  }

  const json& tr = Table(root, "training");
  RejectUnknown(tr, {"learning_rate", "batch_size", "weight_decay", "gradient_clip",
                     "warmup_ratio", "warmup_type", "context_length", "epochs"},
                "training");
  Read(tr, "learning_rate", c.training.learning_rate, "training");
  Read(tr, "batch_size", c.training.batch_size, "training");
  Read(tr, "weight_decay", c.training.weight_decay, "training");
  Read(tr, "gradient_clip", c.training.gradient_clip, "training");
  Read(tr, "warmup_ratio", c.training.warmup_ratio, "training");
  Read(tr, "warmup_type", c.training.warmup_type, "training");
  Read(tr, "context_length", c.training.context_length, "training");
  Read(tr, "epochs", c.training.epochs, "training");

  c.inference.serialize = c.serialize;
  c.Validate();
  return c;
}

Config Config::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromToml(buf.str());
}

std::string Config::ToToml() const {
  std::ostringstream out;
  out << "[templates]\n"
      << "serialization = " << TomlQuote(serialize.serialization_template) << "\n"
      << "irsp_wrapper = " << TomlQuote(masker.irsp_wrapper) << "\n"
      << "ir_wrapper = " << TomlQuote(masker.ir_wrapper) << "\n"
      << "closest_option = " << TomlQuote(inference.closest_option_template) << "\n"
      << "program_suffix = " << TomlQuote(inference.program_suffix) << "\n\n"
      << "[mix]\n"
      << "r_task_irsp = " << FloatToml(mix.r_task_irsp) << "\n"
      << "r_task_ir = " << FloatToml(mix.r_task_ir) << "\n"
      << "shuffle_seed = " << mix.shuffle_seed << "\n"
      << "ratio_semantics = " << TomlQuote(ToString(mix.semantics)) << "\n\n"
      << "[mask.irsp]\n"
      << PolicyToml(mix.irsp_policy) << "\n"
      << "[mask.ir]\n"
      << PolicyToml(mix.ir_policy)
      << "questions_always_eligible = " << (masker.questions_always_eligible ? "true" : "false")
      << "\n\n"
      << "[executor]\n"
      << "kind = " << TomlQuote(ToString(executor)) << "\n"
      << "timeout_s = " << FloatToml(sandbox.timeout.count()) << "\n"
      << "command = [";
  for (std::size_t i = 0; i < sandbox.command.size(); ++i) {
    out << (i ? ", " : "") << TomlQuote(sandbox.command[i]);
  }
  out << "]\n\n"
      << "[endpoint]\n"
      << "url = " << TomlQuote(endpoint.endpoint) << "\n"
      << "adapter = " << TomlQuote(endpoint.adapter == EndpointAdapter::kRaw ? "raw" : "chat")
      << "\n"
      << "timeout_s = " << FloatToml(endpoint.timeout.count()) << "\n"
      << "model = " << TomlQuote(endpoint.model) << "\n"
      << "retries = " << endpoint.retries << "\n\n"
      << "[generation]\n"
      << "max_new = " << inference.max_new << "\n"
      << "temperature = " << FloatToml(inference.temperature) << "\n"
      << "stop = [";
  for (std::size_t i = 0; i < inference.stop.size(); ++i) {
    out << (i ? ", " : "") << TomlQuote(inference.stop[i]);
  }
  out << "]\n\n"
      << "[eval]\n"
      << "concurrency = " << concurrency << "\n"
      << "closest_option_mode = "
      << TomlQuote(inference.closest_mode == ClosestOptionMode::kLocal ? "local" : "model")
      << "\n\n"
      << "[report]\n"
      << "gain_mode = "
      << TomlQuote(gain_mode == GainMode::kFixedFraction ? "fixed_fraction" : "net_reduction")
      << "\n\n"
      << "# Documentation only; this toolkit does not train.\n"
      << "[training]\n"
      << "learning_rate = " << text::FormatNumber(training.learning_rate) << "\n"
      << "batch_size = " << training.batch_size << "\n"
      << "weight_decay = " << FloatToml(training.weight_decay) << "\n"
      << "gradient_clip = " << FloatToml(training.gradient_clip) << "\n"
      << "warmup_ratio = " << FloatToml(training.warmup_ratio) << "\n"
      << "warmup_type = " << TomlQuote(training.warmup_type) << "\n"
      << "context_length = " << training.context_length << "\n"
      << "epochs = " << training.epochs << "\n";
  return out.str();
}

}  // namespace dualforge
