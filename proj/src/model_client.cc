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

#include "dualforge/model_client.h"

#include "httplib.h"
#include "json.hpp"

#include "dualforge/error.h"

namespace dualforge {

void GenerationRequest::Validate() const {
  if (max_new < 1) throw UsageError("max_new must be >= 1");
  if (temperature < 0) throw UsageError("temperature must be >= 0");
}

HttpModelClient::HttpModelClient(HttpClientOptions options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("endpoint must be an http(s) URL, got \"" + url + "\"");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw UsageError("unsupported endpoint scheme \"" + scheme + "\"");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw UsageError("this build has no TLS support; use an http endpoint");
#endif
  const std::size_t path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

std::string HttpModelClient::Generate(const GenerationRequest& request) const {
  request.Validate();
  for (int attempt = 0;; ++attempt) {
    try {
      return GenerateOnce(request);
    } catch (const TransportError&) {
      if (attempt >= options_.retries) throw;
    }
  }
}

std::string HttpModelClient::GenerateOnce(const GenerationRequest& request) const {
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (options_.api_key && !options_.api_key->empty()) {
    headers.emplace("Authorization", "Bearer " + *options_.api_key);
  }

  nlohmann::json body;
  std::string path;
  if (options_.adapter == EndpointAdapter::kRaw) {
    path = base_path_ + "/generate";
    body = {{"prompt", request.prompt},
            {"max_tokens", request.max_new},
            {"temperature", request.temperature},
            {"stop", request.stop}};
  } else {
    path = base_path_ + "/chat/completions";
    body = {{"messages", {{{"role", "user"}, {"content", request.prompt}}}},
            {"max_tokens", request.max_new},
            {"temperature", request.temperature}};
    if (!request.stop.empty()) body["stop"] = request.stop;
    if (!options_.model.empty()) body["model"] = options_.model;
  }

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + scheme_host_port_ + path + ": " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("POST " + scheme_host_port_ + path + ": HTTP " +
                         std::to_string(res->status));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    if (options_.adapter == EndpointAdapter::kRaw) return reply.at("text").get<std::string>();
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed reply from " + scheme_host_port_ + path + ": " + e.what());
  }
}

}  // namespace dualforge
