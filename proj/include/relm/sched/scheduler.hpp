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

#include <optional>
#include <string>
#include <vector>

#include "relm/common/error.hpp"
#include "relm/exec/dedup_cache.hpp"
#include "relm/llm/backend.hpp"
#include "relm/llm/validate.hpp"
#include "relm/sched/batch.hpp"
#include "relm/sched/metrics.hpp"

namespace relm {

enum class OnExhausted { NullValue, FailQuery };

struct SchedulerConfig {
  int window = 8;  // W: max envelopes in flight (documented ceiling: 256)
  int64_t context_window_tokens = 128'000;
  // Budget for Budgeted assembly; 0 = context window minus system prompt.
  int64_t token_budget = 0;
  RowsPerRequest rows_per_request = RowsPerRequest::One;
  int max_retries = 3;
  OnExhausted on_exhausted = OnExhausted::NullValue;
  uint64_t seed = 42;
  bool validate_outputs = true;  // diagnostic flag; off = raw text passthrough

  // Simulated clock: virtual dispatcher costs. Dispatching an envelope and
  // validating a completed request occupy the (serial) client thread, which
  // is what starves a W=1 backend between calls.
  bool simulated_clock = true;
  int64_t sim_dispatch_us = 1'000;
  int64_t sim_validate_us = 2'000;

  int64_t effective_token_budget(const std::string &system_prompt) const;
};

struct RowError {
  ErrorCode code = ErrorCode::Validation;
  std::string message;
};

struct RowOutcome {
  RowTag tag;
  std::optional<TypedValue> value;  // empty on null/error
  bool nulled = false;
  std::optional<RowError> error;
  int attempts = 0;
};

/// Turns per-row requests into batched, bounded-concurrency backend traffic.
/// Contract: single producer, single consumer; every input row_tag appears
/// exactly once in the output, restored to input order; at most W envelopes
/// in flight; validation failures retried with an instruction-reinforced
/// re-prompt; duplicate dedup_keys coalesce onto one in-flight call.
class Scheduler {
 public:
  Scheduler(SchedulerConfig config, Backend &backend,
            DedupCache *dedup = nullptr)
      : config_(config), backend_(backend), dedup_(dedup) {}

  /// Blocking run over a request batch. Throws QueryAborted (FailQuery
  /// policy) or BackendDown (transport retries exhausted).
  std::vector<RowOutcome> run(std::vector<InferenceRequest> requests);

  const SchedulerMetrics &metrics() const { return metrics_; }

 private:
  std::vector<RowOutcome> run_simulated(std::vector<InferenceRequest> requests);
  std::vector<RowOutcome> run_threaded(std::vector<InferenceRequest> requests);

  SchedulerConfig config_;
  Backend &backend_;
  DedupCache *dedup_;
  SchedulerMetrics metrics_;
};

/// Builds the retry request for a failed attempt: the clarification line
/// restating the contract is appended and the attempt counter bumped.
InferenceRequest build_retry_request(const InferenceRequest &request);

}  // namespace relm
