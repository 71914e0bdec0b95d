// Copyright 2026-present the relm project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relm/llm/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "relm/common/error.hpp"
#include "relm/common/tokens.hpp"
#include "relm/llm/constraint.hpp"

namespace relm {

HttpBackend::HttpBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  if (descriptor_.endpoint.empty() || descriptor_.model.empty()) {
    throw EngineError(ErrorCode::Config,
                      "HTTP backend requires an endpoint and a model name");
  }
  if (!descriptor_.api_key_env.empty()) {
    if (const char *key = std::getenv(descriptor_.api_key_env.c_str())) {
      api_key_ = key;
    }
  }
}

BackendResult HttpBackend::invoke(const InferenceRequest &request) {
  nlohmann::json body = {
      {"model", descriptor_.model},
      {"messages",
       {{{"role", "system"}, {"content", request.system_prompt}},
        {{"role", "user"}, {"content", request.rendered_prompt}}}},
      {"temperature", 0},
      {"max_tokens", request.max_output_tokens},
  };
  if (request.constrained &&
      descriptor_.dialect != ConstraintDialect::None) {
    nlohmann::json payload =
        constraint_payload(request.contract, descriptor_.dialect);
    for (auto &[key, value] : payload.items()) {
      body[key] = value;
    }
  }

  httplib::Client client(descriptor_.endpoint);
  client.set_connection_timeout(descriptor_.timeout_ms / 1000,
                                (descriptor_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(descriptor_.timeout_ms / 1000,
                          (descriptor_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  auto res = client.Post("/v1/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read || err == httplib::Error::Write) {
      throw EngineError(ErrorCode::Timeout,
                        "request timed out against " + descriptor_.endpoint);
    }
    throw EngineError(ErrorCode::Transport,
                      "cannot reach backend " + descriptor_.endpoint + ": " +
                          httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw EngineError(ErrorCode::BackendRefused,
                      "backend returned HTTP " + std::to_string(res->status) +
                          ": " + res->body);
  }

  nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
    throw EngineError(ErrorCode::BackendRefused,
                      "malformed chat-completions response: " + res->body);
  }

  BackendResult result;
  result.text =
      doc["choices"][0].value("message", nlohmann::json::object())
          .value("content", "");
  if (doc.contains("usage") && doc["usage"].contains("prompt_tokens")) {
    result.usage.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
    result.usage.output_tokens = doc["usage"].value("completion_tokens", 0);
    result.usage.estimated = false;
  } else {
    result.usage.prompt_tokens = estimate_tokens(request.system_prompt) +
                                 estimate_tokens(request.rendered_prompt);
    result.usage.output_tokens = estimate_tokens(result.text);
    result.usage.estimated = true;
  }
  return result;
}

}  // namespace relm
