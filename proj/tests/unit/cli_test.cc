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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "dualforge/cli.h"
#include "dualforge/config.h"
#include "dualforge/corpus.h"
#include "dualforge/inference.h"
#include "dualforge/mixer.h"
#include "support/local_server.h"
#include "support/test_support.h"

using namespace dualforge;
using namespace dualforge::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kData = DUALFORGE_TEST_DATA;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dualforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

// Replies to the PoT prompt for each small-benchmark question with a
// program that the mock executor can run.
class FakeModel {
 public:
  FakeModel() {
    srv_.server().Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const std::string prompt = json::parse(req.body).at("prompt");
      std::string reply = "I cannot tell.";
      if (prompt.find("2 plus 2") != std::string::npos) reply = "print(2 + 2)";
      if (prompt.find("10 minus 3") != std::string::npos) reply = "print(10 - 3)";
      if (prompt.find("6 times 7") != std::string::npos) reply = "```python\nx = 6 * 7\nprint(x)\n```";
      if (prompt.find("twelve") != std::string::npos) reply = "print(\"B\")";
      res.set_content(json{{"text", reply}}.dump(), "application/json");
    });
  }
  std::string url() const { return srv_.url(); }
  std::atomic<int> requests{0};

 private:
  LocalServer srv_;
};

}  // namespace

TEST_CASE("help lists every interface flag") {
  const auto top = Cli({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"build-data", "mix", "eval", "score", "compare", "sweep", "config"}) {
    CHECK(top.out.find(sub) != std::string::npos);
  }
  CHECK(top.out.find("--config") != std::string::npos);
  CHECK(top.out.find("--seed") != std::string::npos);

  const auto all = Cli({"--help-all"});
  CHECK(all.code == 0);
  for (const char* flag : {"--config", "--seed", "--r-task", "--r-mask", "--endpoint", "--executor",
                           "--resume", "--out", "--format"}) {
    INFO(flag);
    CHECK(all.out.find(flag) != std::string::npos);
  }

  const std::map<std::string, std::vector<std::string>> per_sub = {
      {"build-data", {"--corpus", "--task", "--r-mask", "--out"}},
      {"mix", {"--corpus", "--irsp", "--ir", "--task", "--r-task", "--r-mask", "--out"}},
      {"eval", {"--benchmark", "--endpoint", "--executor", "--resume", "--concurrency", "--out"}},
      {"score", {"--benchmark", "--outcomes", "--run-id", "--format", "--out"}},
      {"compare", {"--baseline", "--treatment", "--gain-mode", "--format", "--out"}},
      {"sweep", {"--task", "--r-task", "--r-mask", "--out"}},
      {"config", {"--out"}},
  };
  for (const auto& [sub, flags] : per_sub) {
    const auto r = Cli({sub, "--help"});
    INFO(sub);
    CHECK(r.code == 0);
    for (const auto& flag : flags) {
      INFO(flag);
      CHECK(r.out.find(flag) != std::string::npos);
    }
  }
}

TEST_CASE("usage errors exit 1") {
  CHECK(Cli({}).code == 1);
  CHECK(Cli({"frobnicate"}).code == 1);
  CHECK(Cli({"config", "--bogus"}).code == 1);
  CHECK(Cli({"build-data", "--task", "irsp", "--out", "x"}).code == 1);
  CHECK(Cli({"build-data", "--corpus", kData + "/missing.jsonl", "--task", "irsp", "--out", "x"})
            .code == 1);
  CHECK(Cli({"--config", kData + "/missing.toml", "config"}).code == 1);
  TempDir dir;
  CHECK(Cli({"build-data", "--corpus", kData + "/corpus_small.jsonl", "--task", "base", "--out",
             (dir / "x").string()})
            .code == 1);
  const auto r = Cli({"mix", "--corpus", kData + "/corpus_small.jsonl", "--r-task", "0.3", "--out",
                      (dir / "m").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("--task") != std::string::npos);
  WriteFile(dir / "bad.toml", "[mix]\nnope = 1\n");
  CHECK(Cli({"--config", (dir / "bad.toml").string(), "config"}).code == 1);
}

TEST_CASE("config prints defaults and honours overrides") {
  const auto r = Cli({"config"});
  CHECK(r.code == 0);
  CHECK(r.out == Config{}.ToToml());
  TempDir dir;
  WriteFile(dir / "c.toml", "[mask.ir]\nr_mask = 0.5\n");
  const auto o = Cli({"--config", (dir / "c.toml").string(), "--seed", "7", "config", "--out",
                      (dir / "eff.toml").string()});
  CHECK(o.code == 0);
  const Config c = Config::Load(dir / "eff.toml");
  CHECK(c.mix.ir_policy.r_mask == 0.5);
  CHECK(c.mix.shuffle_seed == 7);
  CHECK(c.mix.irsp_policy.seed == 7);
  CHECK(c.mix.ir_policy.seed == 7);
  WriteFile(dir / "bad.toml", "[eval]\nconcurrency = 0\n");
  CHECK(Cli({"--config", (dir / "bad.toml").string(), "config"}).code == 2);
}

TEST_CASE("build-data on the small corpus") {
  TempDir dir;
  const auto irsp = Cli({"build-data", "--corpus", kData + "/corpus_small.jsonl", "--task", "irsp",
                         "--out", (dir / "irsp.jsonl").string()});
  REQUIRE(irsp.code == 0);
  const auto lines = Lines(irsp.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "task=irsp r_mask=0.15 seed=0");
  CHECK(lines[1] == "built=2 skipped=1");
  CHECK(lines[2] == "  skipped.too_few_segments=1");
  CHECK(Lines(ReadFile(dir / "irsp.jsonl")).size() == 2);

  const auto ir = Cli({"build-data", "--corpus", kData + "/corpus_small.jsonl", "--task", "ir",
                       "--out", (dir / "ir.jsonl").string()});
  REQUIRE(ir.code == 0);
  CHECK(Lines(ir.out)[0] == "task=ir r_mask=0.6 seed=0");

  const auto custom = Cli({"--seed", "5", "build-data", "--corpus", kData + "/corpus_small.jsonl",
                           "--task", "irsp", "--r-mask", "0.5", "--out", (dir / "c.jsonl").string()});
  CHECK(Lines(custom.out)[0] == "task=irsp r_mask=0.5 seed=5");

  const auto none = Cli({"build-data", "--corpus", kData + "/corpus_no_numerals.jsonl", "--task",
                         "ir", "--out", (dir / "none.jsonl").string()});
  CHECK(none.code == 2);
  CHECK(none.err.find("zero maskable") != std::string::npos);

  CHECK(Cli({"build-data", "--corpus", kData + "/corpus_small.jsonl", "--task", "irsp",
             "--r-mask", "1.5", "--out", (dir / "r.jsonl").string()})
            .code == 2);
}

TEST_CASE("build and mix are byte-identical across runs") {
  RecordFactory f(99);
  const auto records = f.Records(400);
  TempDir runs[2];
  for (auto& dir : runs) {
    WriteCorpus(records, dir / "corpus.jsonl");
    const std::string corpus = (dir / "corpus.jsonl").string();
    REQUIRE(Cli({"--seed", "3", "build-data", "--corpus", corpus, "--task", "irsp", "--out",
                 (dir / "irsp.jsonl").string()})
                .code == 0);
    REQUIRE(Cli({"--seed", "3", "mix", "--corpus", corpus, "--irsp", (dir / "irsp.jsonl").string(),
                 "--out", (dir / "train.jsonl").string()})
                .code == 0);
    REQUIRE(Cli({"--seed", "3", "mix", "--corpus", corpus, "--out", (dir / "fresh.jsonl").string()})
                .code == 0);
  }
  for (const char* name : {"irsp.jsonl", "train.jsonl", "fresh.jsonl"}) {
    INFO(name);
    const auto a = ReadFile(runs[0] / name);
    CHECK_FALSE(a.empty());
    CHECK(a == ReadFile(runs[1] / name));
  }
  // Manifests differ only in the output path they record.
  json m0 = json::parse(ReadFile(runs[0] / "fresh.jsonl.manifest.json"));
  json m1 = json::parse(ReadFile(runs[1] / "fresh.jsonl.manifest.json"));
  CHECK(m0.at("path") != m1.at("path"));
  m0.erase("path");
  m1.erase("path");
  CHECK(m0 == m1);
}

TEST_CASE("mix reports counts and writes a manifest") {
  RecordFactory f(1);
  TempDir dir;
  WriteCorpus(f.Records(100), dir / "corpus.jsonl");
  const auto r = Cli({"mix", "--corpus", (dir / "corpus.jsonl").string(), "--task", "irsp",
                      "--r-task", "0.3", "--r-task-ir", "0.1", "--out", (dir / "t.jsonl").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out == "base=100 irsp=30 ir=10\n");
  const json manifest = json::parse(ReadFile(dir / "t.jsonl.manifest.json"));
  CHECK(manifest.dump().find("0.3") != std::string::npos);
  const auto lines = Lines(ReadFile(dir / "t.jsonl"));
  REQUIRE(lines.size() == 141);
  CHECK(json::parse(lines[0]).at("_schema") == "dualforge-train-v1");

  const auto share = Cli({"mix", "--corpus", (dir / "corpus.jsonl").string(), "--r-task-irsp",
                          "0.2", "--r-task-ir", "0.2", "--ratio-semantics", "share", "--out",
                          (dir / "s.jsonl").string()});
  REQUIRE(share.code == 0);
  // Shares of the whole mixture: 0.2 / (1 - 0.4) * 100 = 33.3 each.
  CHECK(share.out == "base=100 irsp=33 ir=33\n");
}

TEST_CASE("sweep writes the 4x4 grid") {
  TempDir dir;
  const auto r = Cli({"sweep", "--out", (dir / "grid").string()});
  REQUIRE(r.code == 0);
  const auto lines = Lines(r.out);
  CHECK(lines.size() == 16);
  std::set<std::pair<double, double>> points;
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "grid")) {
    ++files;
    const Config c = Config::Load(entry.path());
    points.emplace(c.mix.r_task_irsp, c.mix.irsp_policy.r_mask);
    CHECK(c.mix.r_task_ir == 0.0);
  }
  CHECK(files == 16);
  std::set<std::pair<double, double>> expected;
  for (double t : {0.2, 0.4, 0.6, 0.8}) {
    for (double m : {0.15, 0.4, 0.6, 0.8}) expected.emplace(t, m);
  }
  CHECK(points == expected);
  CHECK(fs::exists(dir / "grid" / "irsp_rtask0.2_rmask0.15.toml"));

  const auto ir = Cli({"sweep", "--task", "ir", "--r-task", "0.1", "0.5", "--r-mask", "0.3",
                       "--out", (dir / "ir").string()});
  REQUIRE(ir.code == 0);
  CHECK(Lines(ir.out).size() == 2);
  CHECK(fs::exists(dir / "ir" / "ir_rtask0.5_rmask0.3.toml"));
}

TEST_CASE("eval, resume, score and compare") {
  FakeModel model;
  TempDir dir;
  const std::string bench = kData + "/bench_small.jsonl";
  const std::string out = (dir / "run.jsonl").string();

  const auto r = Cli({"eval", "--benchmark", bench, "--endpoint", model.url(), "--executor", "mock",
                      "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out == "evaluated=4 skipped_existing=0\n");
  const auto full = ReadOutcomeFile(out);
  REQUIRE(full.size() == 4);
  for (const auto& o : full) {
    CHECK(o.path != OutcomePath::kUnresolved);
    CHECK(o.benchmark == "bench_small");
  }
  CHECK(model.requests == 4);

  // Rerunning onto an existing file needs --resume.
  CHECK(Cli({"eval", "--benchmark", bench, "--endpoint", model.url(), "--executor", "mock",
             "--out", out})
            .code == 1);

  // Two complete lines and a torn third.
  const auto lines = Lines(ReadFile(out));
  const std::string partial = (dir / "partial.jsonl").string();
  WriteFile(partial, lines[0] + "\n" + lines[1] + "\n" + lines[2].substr(0, 10));
  model.requests = 0;
  const auto resumed = Cli({"eval", "--benchmark", bench, "--endpoint", model.url(), "--executor",
                            "mock", "--resume", "--out", partial});
  REQUIRE(resumed.code == 0);
  CHECK(resumed.out == "evaluated=2 skipped_existing=2\n");
  CHECK(model.requests == 2);
  const auto after = ReadOutcomeFile(partial);
  REQUIRE(after.size() == 4);
  std::set<std::string> ids;
  for (const auto& o : after) ids.insert(o.item_id);
  CHECK(ids == std::set<std::string>{"b1", "b2", "b3", "b4"});

  const auto again = Cli({"eval", "--benchmark", bench, "--endpoint", model.url(), "--executor",
                          "mock", "--resume", "--out", partial});
  CHECK(again.out == "evaluated=0 skipped_existing=4\n");

  const auto score = Cli({"score", "--benchmark", bench, "--outcomes", out, "--run-id", "ours",
                          "--format", "csv"});
  REQUIRE(score.code == 0);
  const auto rows = Lines(score.out);
  REQUIRE(rows.size() == 2);
  // b4 resolves through the option-direct path.
  CHECK(rows[1] == "ours,bench_small,4,4,100.0,3,0,1,0,0");

  const auto cmp = Cli({"compare", "--benchmark", bench, "--baseline", out, "--treatment", partial,
                        "--format", "csv"});
  REQUIRE(cmp.code == 0);
  CHECK(Lines(cmp.out)[1] == "run,partial,0,0,0,0.000,fixed_fraction");
}

TEST_CASE("eval endpoint from the environment, failures exit 3") {
  FakeModel model;
  TempDir dir;
  const std::string bench = kData + "/bench_small.jsonl";
  ::setenv("DUALFORGE_ENDPOINT", model.url().c_str(), 1);
  const auto r = Cli({"eval", "--benchmark", bench, "--executor", "mock", "--concurrency", "2",
                      "--out", (dir / "env.jsonl").string()});
  ::unsetenv("DUALFORGE_ENDPOINT");
  CHECK(r.code == 0);
  CHECK(Cli({"eval", "--benchmark", bench, "--executor", "mock", "--out",
             (dir / "none.jsonl").string()})
            .code == 1);

  // Nothing listens on a port we just released.
  std::string dead;
  {
    LocalServer gone;
    dead = gone.url();
  }
  const auto t = Cli({"eval", "--benchmark", bench, "--endpoint", dead, "--executor", "mock",
                      "--out", (dir / "t.jsonl").string()});
  CHECK(t.code == 3);
  CHECK(t.err.find("transport") != std::string::npos);

  WriteFile(dir / "c.toml", "[executor]\ncommand = [\"/nonexistent/dualforge-runner\"]\n");
  const auto l = Cli({"--config", (dir / "c.toml").string(), "eval", "--benchmark", bench,
                      "--endpoint", model.url(), "--executor", "sandbox", "--out",
                      (dir / "l.jsonl").string()});
  CHECK(l.code == 3);
}

TEST_CASE("score and compare data errors exit 2") {
  TempDir dir;
  const std::string bench = kData + "/bench_small.jsonl";
  InferenceOutcome o;
  o.item_id = "not-in-bench";
  o.benchmark = "bench_small";
  WriteFile(dir / "o.jsonl", ToJson(o).dump() + "\n");
  const auto s = Cli({"score", "--benchmark", bench, "--outcomes", (dir / "o.jsonl").string()});
  CHECK(s.code == 2);
  CHECK(s.err.find("not-in-bench") != std::string::npos);

  WriteFile(dir / "empty.jsonl", "");
  const auto w = Cli({"score", "--benchmark", bench, "--outcomes", (dir / "empty.jsonl").string()});
  CHECK(w.code == 0);
  CHECK(w.err.find("warning") != std::string::npos);
  CHECK(Cli({"score", "--benchmark", bench, "--outcomes", (dir / "empty.jsonl").string(),
             "--format", "xml"})
            .code != 0);
  CHECK(Cli({"compare", "--benchmark", bench, "--baseline", (dir / "empty.jsonl").string(),
             "--treatment", (dir / "empty.jsonl").string(), "--gain-mode", "ratio"})
            .code == 1);
}
