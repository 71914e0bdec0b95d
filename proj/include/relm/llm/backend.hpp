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

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "relm/llm/contract.hpp"

namespace relm {

enum class ConstraintDialect { None, JsonSchemaResponseFormat, GuidedChoiceRegex };

enum class BackendKind { Mock, OpenAiCompatibleHttp };

struct BackendDescriptor {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint;      // e.g. http://localhost:8000 (ignored by Mock)
  std::string model;         // model name for the chat body
  std::string api_key_env;   // environment variable holding the key
  ConstraintDialect dialect = ConstraintDialect::None;
  int timeout_ms = 30000;
};

/// Identifies a row within a query execution: the plan operator plus the
/// row's ordinal in that operator's input.
struct RowTag {
  int32_t operator_id = 0;
  int64_t ordinal = 0;

  bool operator==(const RowTag &) const = default;
};

struct InferenceRequest {
  uint64_t request_id = 0;
  std::string rendered_prompt;
  std::string system_prompt;
  OutputContract contract;
  RowTag row_tag;
  int64_t max_output_tokens = 256;
  bool constrained = false;  // true iff contract is not FreeText
  int attempt = 1;           // 1-based; retries re-render and bump this
  uint64_t dedup_key = 0;    // 0 = not deduplicable
};

struct TokenUsage {
  int64_t prompt_tokens = 0;
  int64_t output_tokens = 0;
  bool estimated = false;  // true when derived from character counts
};

struct BackendResult {
  std::string text;
  TokenUsage usage;
};

/// One call per request; batching and concurrency belong to the scheduler.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const BackendDescriptor &descriptor() const = 0;

  /// Blocking single-request invocation.
  virtual BackendResult invoke(const InferenceRequest &request) = 0;

  /// Simulated-clock support: result plus a virtual service time, without
  /// sleeping. Backends without a service model return nullopt and force the
  /// scheduler onto the threaded path.
  struct SimulatedCall {
    BackendResult result;
    int64_t service_us = 0;
  };
  virtual std::optional<SimulatedCall> simulate(const InferenceRequest &) {
    return std::nullopt;
  }
};

}  // namespace relm
