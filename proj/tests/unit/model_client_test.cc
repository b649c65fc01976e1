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
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include "dualforge/error.h"
#include "dualforge/model_client.h"
#include "support/local_server.h"

using namespace dualforge;
using nlohmann::json;
using dualforge::testing::LocalServer;

namespace {

HttpClientOptions Options(const std::string& endpoint, EndpointAdapter adapter = EndpointAdapter::kRaw) {
  HttpClientOptions o;
  o.endpoint = endpoint;
  o.adapter = adapter;
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST_CASE("raw adapter request and reply") {
  LocalServer srv;
  json seen;
  std::string auth;
  srv.server().Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(json{{"text", "print(3+4)"}}.dump(), "application/json");
  });
  auto opts = Options(srv.url());
  opts.api_key = "sekret";
  HttpModelClient client(opts);
  GenerationRequest req;
  req.prompt = "Q";
  req.stop = {"###"};
  CHECK(client.Generate(req) == "print(3+4)");
  CHECK(seen.at("prompt") == "Q");
  CHECK(seen.at("max_tokens") == 1500);
  CHECK(seen.at("temperature") == 0.0);
  CHECK(seen.at("stop") == json::array({"###"}));
  CHECK(auth == "Bearer sekret");
}

TEST_CASE("chat adapter") {
  LocalServer srv;
  json seen;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "The answer is 7."}}}}}}}.dump(),
                    "application/json");
  });
  auto opts = Options(srv.url("/v1/"), EndpointAdapter::kChat);
  opts.model = "m";
  HttpModelClient client(opts);
  GenerationRequest req;
  req.prompt = "hello";
  req.max_new = 32;
  CHECK(client.Generate(req) == "The answer is 7.");
  CHECK(seen.at("messages").at(0).at("content") == "hello");
  CHECK(seen.at("messages").at(0).at("role") == "user");
  CHECK(seen.at("model") == "m");
  CHECK(seen.at("max_tokens") == 32);
  CHECK_FALSE(seen.contains("stop"));
}

TEST_CASE("one retry on transport failure") {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"text":"ok"})", "application/json");
  });
  HttpModelClient client(Options(srv.url()));
  GenerationRequest req;
  req.prompt = "x";
  CHECK(client.Generate(req) == "ok");
  CHECK(calls == 2);
}

TEST_CASE("persistent failures surface as transport errors") {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.set_content("not json", "text/plain");
  });
  HttpModelClient client(Options(srv.url()));
  GenerationRequest req;
  req.prompt = "x";
  CHECK_THROWS_AS(client.Generate(req), TransportError);
  CHECK(calls == 2);

  // Nothing listens on this port once the server is gone.
  std::string dead;
  {
    LocalServer gone;
    dead = gone.url();
  }
  auto opts = Options(dead);
  opts.timeout = std::chrono::seconds(1);
  CHECK_THROWS_AS(HttpModelClient(opts).Generate(req), TransportError);
}

TEST_CASE("client configuration errors") {
  CHECK_THROWS_AS(HttpModelClient(Options("localhost:8000")), UsageError);
  CHECK_THROWS_AS(HttpModelClient(Options("ftp://x")), UsageError);
  CHECK_THROWS_AS(HttpModelClient(Options("https://x")), UsageError);
  GenerationRequest bad;
  bad.max_new = 0;
  CHECK_THROWS_AS(bad.Validate(), UsageError);
  bad.max_new = 1;
  bad.temperature = -1;
  CHECK_THROWS_AS(bad.Validate(), UsageError);
}
