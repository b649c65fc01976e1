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

#include "dualforge/executor.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "dualforge/error.h"
#include "dualforge/jsonl.h"
#include "dualforge/text.h"

namespace dualforge {

std::string_view ToString(FailureReason reason) {
  switch (reason) {
    case FailureReason::kException:
      return "exception";
    case FailureReason::kTimeout:
      return "timeout";
    case FailureReason::kEmptyOutput:
      return "empty_output";
    case FailureReason::kNonzeroExit:
      return "nonzero_exit";
  }
  return "exception";
}

FailureReason ParseFailureReason(std::string_view s) {
  if (s == "exception") return FailureReason::kException;
  if (s == "timeout") return FailureReason::kTimeout;
  if (s == "empty_output") return FailureReason::kEmptyOutput;
  if (s == "nonzero_exit") return FailureReason::kNonzeroExit;
  throw DataError("unknown execution status \"" + std::string(s) + "\"");
}

nlohmann::json ToJson(const ExecResult& r) {
  if (const auto* v = std::get_if<ExecValue>(&r)) {
    return {{"status", "value"}, {"value", v->text}};
  }
  const auto& f = std::get<ExecFailure>(r);
  return {{"status", ToString(f.reason)}, {"detail", f.detail}};
}

ExecResult ExecResultFromJson(const nlohmann::json& j) {
  const std::string status = j.at("status").get<std::string>();
  if (status == "value") return ExecValue{j.at("value").get<std::string>()};
  return ExecFailure{ParseFailureReason(status), j.value("detail", "")};
}

// ---------------------------------------------------------------------------
// MockExecutor

namespace {

struct PyError {
  std::string message;
};

struct Value {
  enum class Kind { kInt, kFloat, kStr } kind = Kind::kInt;
  long long i = 0;
  double f = 0;
  std::string s;

  static Value Int(long long v) { return {Kind::kInt, v, 0, {}}; }
  static Value Float(double v) { return {Kind::kFloat, 0, v, {}}; }
  static Value Str(std::string v) { return {Kind::kStr, 0, 0, std::move(v)}; }

  bool is_num() const { return kind != Kind::kStr; }
  double as_double() const { return kind == Kind::kInt ? static_cast<double>(i) : f; }
};

std::string FloatRepr(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[512];
  const double a = std::fabs(v);
  if (v == 0 || (a >= 1e-4 && a < 1e16)) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    std::string s(buf, p);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
  }
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific);
  return std::string(buf, p);
}

std::string Str(const Value& v) {
  switch (v.kind) {
    case Value::Kind::kInt:
      return std::to_string(v.i);
    case Value::Kind::kFloat:
      return FloatRepr(v.f);
    case Value::Kind::kStr:
      return v.s;
  }
  return {};
}

enum class Tok { kNum, kStr, kName, kOp, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
};

std::vector<Token> Tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (text::IsSpace(c)) {
      ++i;
      continue;
    }
    if (text::IsDigit(c) || (c == '.' && i + 1 < line.size() && text::IsDigit(line[i + 1]))) {
      std::size_t j = i;
      while (j < line.size() && (text::IsDigit(line[j]) || line[j] == '.' || line[j] == '_')) ++j;
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && text::IsDigit(line[k])) {
          j = k;
          while (j < line.size() && text::IsDigit(line[j])) ++j;
        }
      }
      out.push_back({Tok::kNum, text::ReplaceAll(line.substr(i, j - i), "_", "")});
      i = j;
      continue;
    }
    if (text::IsAlpha(c) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (text::IsAlnum(line[j]) || line[j] == '_')) ++j;
      out.push_back({Tok::kName, std::string(line.substr(i, j - i))});
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::string s;
      std::size_t j = i + 1;
      while (j < line.size() && line[j] != c) {
        if (line[j] == '\\' && j + 1 < line.size()) {
          ++j;
          s.push_back(line[j] == 'n' ? '\n' : line[j]);
        } else {
          s.push_back(line[j]);
        }
        ++j;
      }
      if (j >= line.size()) throw PyError{"SyntaxError: unterminated string literal"};
      out.push_back({Tok::kStr, std::move(s)});
      i = j + 1;
      continue;
    }
    static constexpr std::string_view kOps[] = {"**", "//", "+=", "-=", "*=", "/=", "==",
                                                "+",  "-",  "*",  "/",  "%",  "(",  ")",
                                                ",",  "=",  "."};
    bool matched = false;
    for (auto op : kOps) {
      if (line.substr(i).starts_with(op)) {
        out.push_back({Tok::kOp, std::string(op)});
        i += op.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw PyError{"SyntaxError: invalid character '" + std::string(1, c) + "'"};
  }
  out.push_back({Tok::kEnd, {}});
  return out;
}

void ThrowIfOverflow(bool overflow) {
  if (overflow) throw PyError{"OverflowError: integer exceeds 64 bits"};
}

Value Arith(const std::string& op, const Value& a, const Value& b) {
  if (!a.is_num() || !b.is_num()) {
    if (op == "+" && !a.is_num() && !b.is_num()) return Value::Str(a.s + b.s);
    throw PyError{"TypeError: unsupported operand type(s) for " + op};
  }
  const bool ints = a.kind == Value::Kind::kInt && b.kind == Value::Kind::kInt;
  long long r = 0;
  if (op == "+") {
    if (ints) {
      ThrowIfOverflow(__builtin_add_overflow(a.i, b.i, &r));
      return Value::Int(r);
    }
    return Value::Float(a.as_double() + b.as_double());
  }
  if (op == "-") {
    if (ints) {
      ThrowIfOverflow(__builtin_sub_overflow(a.i, b.i, &r));
      return Value::Int(r);
    }
    return Value::Float(a.as_double() - b.as_double());
  }
  if (op == "*") {
    if (ints) {
      ThrowIfOverflow(__builtin_mul_overflow(a.i, b.i, &r));
      return Value::Int(r);
    }
    return Value::Float(a.as_double() * b.as_double());
  }
  if (op == "/") {
    if (b.as_double() == 0) throw PyError{"ZeroDivisionError: division by zero"};
    return Value::Float(a.as_double() / b.as_double());
  }
  if (op == "//" || op == "%") {
    if (b.as_double() == 0) {
      throw PyError{op == "//" ? "ZeroDivisionError: integer division or modulo by zero"
                               : "ZeroDivisionError: integer modulo by zero"};
    }
    if (ints) {
      long long q = a.i / b.i;
      long long m = a.i % b.i;
      if (m != 0 && ((m < 0) != (b.i < 0))) {
        --q;
        m += b.i;
      }
      return Value::Int(op == "//" ? q : m);
    }
    const double x = a.as_double();
    const double y = b.as_double();
    const double q = std::floor(x / y);
    return Value::Float(op == "//" ? q : x - q * y);
  }
  if (op == "**") {
    if (ints && b.i >= 0) {
      long long acc = 1;
      for (long long k = 0; k < b.i; ++k) {
        ThrowIfOverflow(__builtin_mul_overflow(acc, a.i, &r));
        acc = r;
      }
      return Value::Int(acc);
    }
    if (a.as_double() == 0 && b.as_double() < 0) {
      throw PyError{"ZeroDivisionError: 0.0 cannot be raised to a negative power"};
    }
    return Value::Float(std::pow(a.as_double(), b.as_double()));
  }
  throw PyError{"SyntaxError: unknown operator " + op};
}

class Interpreter {
 public:
  std::vector<std::string> printed;
  std::optional<Value> trailing;

  void RunLine(std::string_view line) {
    trailing.reset();
    if (text::IsBlank(line) || text::Trim(line).starts_with("#")) return;
    if (text::IsSpace(line.front())) throw PyError{"IndentationError: unexpected indent"};
    toks_ = Tokenize(line);
    pos_ = 0;
    if (Peek().kind == Tok::kName && (Peek().text == "import" || Peek().text == "from")) return;
    if (Peek().kind == Tok::kName) {
      static constexpr std::string_view kUnsupported[] = {
          "def", "for", "while", "if", "elif", "else", "return", "class", "try", "with", "lambda"};
      for (auto kw : kUnsupported) {
        if (Peek().text == kw) throw PyError{"unsupported statement: " + std::string(kw)};
      }
    }
    if (Peek().kind == Tok::kName && toks_.size() > 2 && toks_[1].kind == Tok::kOp) {
      const std::string& op = toks_[1].text;
      if (op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=") {
        const std::string name = Next().text;
        Next();
        Value v = Expr();
        Expect(Tok::kEnd);
        if (op != "=") v = Arith(std::string(1, op[0]), Lookup(name), v);
        vars_[name] = v;
        return;
      }
    }
    if (Peek().kind == Tok::kName && Peek().text == "print" && toks_.size() > 1 &&
        toks_[1].text == "(") {
      Next();
      Next();
      std::vector<std::string> parts;
      if (!Accept(")")) {
        do {
          parts.push_back(Str(Expr()));
        } while (Accept(","));
        ExpectOp(")");
      }
      Expect(Tok::kEnd);
      printed.push_back(text::Join(parts, " "));
      return;
    }
    Value v = Expr();
    Expect(Tok::kEnd);
    trailing = v;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Value> vars_;

  const Token& Peek() const { return toks_[pos_]; }
  const Token& Next() { return toks_[pos_++]; }
  bool Accept(std::string_view op) {
    if (Peek().kind == Tok::kOp && Peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  void ExpectOp(std::string_view op) {
    if (!Accept(op)) throw PyError{"SyntaxError: expected '" + std::string(op) + "'"};
  }
  void Expect(Tok kind) {
    if (Peek().kind != kind) throw PyError{"SyntaxError: invalid syntax near '" + Peek().text + "'"};
  }

  Value Lookup(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw PyError{"NameError: name '" + name + "' is not defined"};
    return it->second;
  }

  Value Expr() {
    Value v = Term();
    while (Peek().kind == Tok::kOp && (Peek().text == "+" || Peek().text == "-")) {
      const std::string op = Next().text;
      v = Arith(op, v, Term());
    }
    return v;
  }

  Value Term() {
    Value v = Unary();
    while (Peek().kind == Tok::kOp &&
           (Peek().text == "*" || Peek().text == "/" || Peek().text == "//" || Peek().text == "%")) {
      const std::string op = Next().text;
      v = Arith(op, v, Unary());
    }
    return v;
  }

  Value Unary() {
    if (Accept("-")) return Arith("-", Value::Int(0), Unary());
    if (Accept("+")) return Unary();
    return Power();
  }

  Value Power() {
    Value base = Primary();
    if (Accept("**")) return Arith("**", base, Unary());
    return base;
  }

  std::vector<Value> Args() {
    std::vector<Value> args;
    if (Accept(")")) return args;
    do {
      args.push_back(Expr());
    } while (Accept(","));
    ExpectOp(")");
    return args;
  }

  static double Num(const Value& v) {
    if (!v.is_num()) throw PyError{"TypeError: must be real number, not str"};
    return v.as_double();
  }

  static Value ToIntValue(double d) {
    if (!std::isfinite(d) || std::fabs(d) > 9.2e18) throw PyError{"OverflowError: cannot convert"};
    return Value::Int(static_cast<long long>(d));
  }

  Value Call(const std::string& fn, const std::vector<Value>& args) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) {
        throw PyError{"TypeError: " + fn + "() takes a different number of arguments"};
      }
    };
    if (fn == "abs") {
      need(1, 1);
      if (args[0].kind == Value::Kind::kInt) return Value::Int(args[0].i < 0 ? -args[0].i : args[0].i);
      return Value::Float(std::fabs(Num(args[0])));
    }
    if (fn == "min" || fn == "max") {
      if (args.empty()) throw PyError{"TypeError: " + fn + " expected at least 1 argument"};
      Value best = args[0];
      for (const auto& a : args) {
        if ((fn == "min" && Num(a) < Num(best)) || (fn == "max" && Num(a) > Num(best))) best = a;
      }
      return best;
    }
    if (fn == "round") {
      need(1, 2);
      const double x = Num(args[0]);
      if (args.size() == 1) {
        if (args[0].kind == Value::Kind::kInt) return args[0];
        return ToIntValue(std::nearbyint(x));
      }
      // Correctly rounded from the exact binary value, ties to even.
      const double digits = Num(args[1]);
      if (digits < 0 || digits > 300) return Value::Float(std::nearbyint(x / std::pow(10.0, -digits)) * std::pow(10.0, -digits));
      char buf[512];
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed,
                                   static_cast<int>(digits));
      double r = 0;
      std::from_chars(buf, p, r);
      return Value::Float(r);
    }
    if (fn == "int") {
      need(1, 1);
      if (args[0].kind == Value::Kind::kStr) {
        auto v = text::ParseDecimal(text::Trim(args[0].s));
        if (!v || args[0].s.find('.') != std::string::npos) {
          throw PyError{"ValueError: invalid literal for int()"};
        }
        return ToIntValue(*v);
      }
      return ToIntValue(std::trunc(Num(args[0])));
    }
    if (fn == "float") {
      need(1, 1);
      if (args[0].kind == Value::Kind::kStr) {
        auto v = text::ParseDecimal(text::Trim(args[0].s));
        if (!v) throw PyError{"ValueError: could not convert string to float"};
        return Value::Float(*v);
      }
      return Value::Float(Num(args[0]));
    }
    if (fn == "str") {
      need(1, 1);
      return Value::Str(Str(args[0]));
    }
    if (fn == "math.sqrt") {
      need(1, 1);
      if (Num(args[0]) < 0) throw PyError{"ValueError: math domain error"};
      return Value::Float(std::sqrt(Num(args[0])));
    }
    if (fn == "math.floor") {
      need(1, 1);
      return ToIntValue(std::floor(Num(args[0])));
    }
    if (fn == "math.ceil") {
      need(1, 1);
      return ToIntValue(std::ceil(Num(args[0])));
    }
    throw PyError{"NameError: name '" + fn + "' is not defined"};
  }

  Value Primary() {
    const Token t = Next();
    switch (t.kind) {
      case Tok::kNum: {
        const bool is_float = t.text.find_first_of(".eE") != std::string::npos;
        if (!is_float) {
          long long v = 0;
          auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
          if (ec != std::errc()) throw PyError{"OverflowError: integer literal too large"};
          return Value::Int(v);
        }
        double d = 0;
        std::string body = t.text;
        if (body.front() == '.') body.insert(body.begin(), '0');
        auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), d);
        if (ec != std::errc() || p != body.data() + body.size()) {
          throw PyError{"SyntaxError: invalid decimal literal"};
        }
        return Value::Float(d);
      }
      case Tok::kStr:
        return Value::Str(t.text);
      case Tok::kName: {
        std::string name = t.text;
        if (Accept(".")) {
          if (Peek().kind != Tok::kName) throw PyError{"SyntaxError: invalid syntax"};
          name += "." + Next().text;
          if (name == "math.pi") return Value::Float(3.141592653589793);
          if (name == "math.e") return Value::Float(2.718281828459045);
        }
        if (Accept("(")) return Call(name, Args());
        return Lookup(name);
      }
      case Tok::kOp:
        if (t.text == "(") {
          Value v = Expr();
          ExpectOp(")");
          return v;
        }
        break;
      case Tok::kEnd:
        break;
    }
    throw PyError{"SyntaxError: invalid syntax near '" + t.text + "'"};
  }
};

}  // namespace

ExecResult MockExecutor::Execute(const std::string& program) const {
  Interpreter interp;
  try {
    std::size_t begin = 0;
    while (begin <= program.size()) {
      std::size_t end = program.find('\n', begin);
      if (end == std::string::npos) end = program.size();
      interp.RunLine(std::string_view(program).substr(begin, end - begin));
      begin = end + 1;
    }
  } catch (const PyError& e) {
    return ExecFailure{FailureReason::kException, e.message};
  }
  for (auto it = interp.printed.rbegin(); it != interp.printed.rend(); ++it) {
    // A printed string may span lines; take its last non-empty line.
    std::string_view chunk = *it;
    while (!chunk.empty()) {
      const std::size_t nl = chunk.rfind('\n');
      std::string_view tail = nl == std::string_view::npos ? chunk : chunk.substr(nl + 1);
      if (!text::IsBlank(tail)) return ExecValue{std::string(text::Trim(tail))};
      if (nl == std::string_view::npos) break;
      chunk = chunk.substr(0, nl);
    }
  }
  if (interp.trailing && !text::IsBlank(Str(*interp.trailing))) {
    return ExecValue{std::string(text::Trim(Str(*interp.trailing)))};
  }
  return ExecFailure{FailureReason::kEmptyOutput, "program produced no output"};
}

// ---------------------------------------------------------------------------
// SandboxExecutor

SandboxExecutor::SandboxExecutor(SandboxOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw UsageError("sandbox runner command is empty");
  if (options_.timeout.count() <= 0) throw UsageError("sandbox timeout must be positive");
}

ExecResult SandboxExecutor::Execute(const std::string& program) const {
  if (program.empty()) return ExecFailure{FailureReason::kEmptyOutput, "empty program"};
  const nlohmann::json request = {{"program", program}, {"timeout_s", options_.timeout.count()}};
  ProcessResult proc =
      RunProcess(options_.command, jsonl::Dump(request) + "\n", options_.timeout + options_.grace);
  if (proc.timed_out) {
    return ExecFailure{FailureReason::kTimeout, "runner exceeded the wall-clock limit"};
  }
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(text::Trim(proc.out));
  } catch (const nlohmann::json::exception&) {
    std::string detail = "runner exited with code " + std::to_string(proc.exit_code);
    if (!text::IsBlank(proc.err)) detail += ": " + std::string(text::Trim(proc.err));
    return ExecFailure{FailureReason::kNonzeroExit, detail};
  }
  if (proc.exit_code != 0) {
    return ExecFailure{FailureReason::kNonzeroExit,
                       "runner exited with code " + std::to_string(proc.exit_code)};
  }
  try {
    const std::string status = response.at("status").get<std::string>();
    if (status == "ok") {
      const auto& value = response.at("value");
      if (!value.is_string()) {
        return ExecFailure{FailureReason::kNonzeroExit,
                           "malformed runner response: ok without a string value"};
      }
      return ExecValue{value.get<std::string>()};
    }
    std::string detail;
    if (auto it = response.find("error"); it != response.end() && it->is_string()) {
      detail = it->get<std::string>();
    }
    return ExecFailure{ParseFailureReason(status), detail};
  } catch (const std::exception& e) {
    return ExecFailure{FailureReason::kNonzeroExit,
                       std::string("malformed runner response: ") + e.what()};
  }
}

}  // namespace dualforge
