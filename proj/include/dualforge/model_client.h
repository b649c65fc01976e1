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
#include <optional>
#include <string>
#include <vector>

namespace dualforge {

struct GenerationRequest {
  std::string prompt;
  int max_new = 1500;
  double temperature = 0.0;
  std::vector<std::string> stop;

  void Validate() const;  // max_new >= 1, temperature >= 0
};

// generate() returns text or throws TransportError. Implementations must be
// safe to call from several threads at once.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string Generate(const GenerationRequest& request) const = 0;
};

enum class EndpointAdapter {
  kRaw,   // POST {endpoint}/generate {"prompt","max_tokens","temperature","stop"} -> {"text"}
  kChat,  // POST {endpoint}/chat/completions, OpenAI-style messages/choices
};

struct HttpClientOptions {
  std::string endpoint;  // e.g. "http://127.0.0.1:8000" or "http://host/v1"
  EndpointAdapter adapter = EndpointAdapter::kRaw;
  std::optional<std::string> api_key;  // sent as "Authorization: Bearer ..."
  std::string model;                   // chat adapter only
  std::chrono::duration<double> timeout{120.0};
  int retries = 1;  // transport-level retries per request
};

class HttpModelClient final : public ModelClient {
 public:
  explicit HttpModelClient(HttpClientOptions options);
  std::string Generate(const GenerationRequest& request) const override;

 private:
  std::string GenerateOnce(const GenerationRequest& request) const;

  HttpClientOptions options_;
  std::string scheme_host_port_;
  std::string base_path_;
};

}  // namespace dualforge
