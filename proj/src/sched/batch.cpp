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

#include "relm/sched/batch.hpp"

#include "relm/common/tokens.hpp"

namespace relm {

namespace {

int64_t prompt_tokens(const InferenceRequest &request) {
  return estimate_tokens(request.rendered_prompt);
}

int64_t reserved_tokens(const InferenceRequest &request) {
  return prompt_tokens(request) + request.max_output_tokens;
}

BatchClass class_of(const InferenceRequest &request) {
  return request.constrained ? BatchClass::Constrained
                             : BatchClass::Unconstrained;
}

}  // namespace

AssembleResult assemble_batches(const std::vector<InferenceRequest> &pending,
                                const AssembleOptions &options,
                                int64_t first_batch_id) {
  AssembleResult result;
  int64_t next_id = first_batch_id;

  if (options.mode == RowsPerRequest::One) {
    result.envelopes.reserve(pending.size());
    for (const auto &request : pending) {
      BatchEnvelope envelope;
      envelope.batch_id = next_id++;
      envelope.cls = class_of(request);
      envelope.prompt_token_sum = prompt_tokens(request);
      envelope.requests.push_back(request);
      result.envelopes.push_back(std::move(envelope));
    }
    return result;
  }

  // Budgeted: combined calls need a uniform row schema, so an envelope only
  // groups requests with identical contracts (which also keeps classes pure).
  BatchEnvelope current;
  int64_t reserved_sum = 0;
  bool open = false;
  auto flush = [&]() {
    if (open && !current.requests.empty()) {
      result.envelopes.push_back(std::move(current));
    }
    current = BatchEnvelope{};
    reserved_sum = 0;
    open = false;
  };

  for (const auto &request : pending) {
    BatchClass cls = class_of(request);
    int64_t need = reserved_tokens(request);
    if (need > options.token_budget) {
      // Oversized request: ship alone, flagged.
      flush();
      BatchEnvelope envelope;
      envelope.batch_id = next_id++;
      envelope.cls = cls;
      envelope.prompt_token_sum = prompt_tokens(request);
      envelope.requests.push_back(request);
      result.envelopes.push_back(std::move(envelope));
      ++result.truncation_warnings;
      continue;
    }
    if (open && (!(request.contract == current.requests.front().contract) ||
                 reserved_sum + need > options.token_budget)) {
      flush();
    }
    if (!open) {
      current.batch_id = next_id++;
      current.cls = cls;
      open = true;
    }
    current.requests.push_back(request);
    current.prompt_token_sum += prompt_tokens(request);
    reserved_sum += need;
  }
  flush();
  return result;
}

}  // namespace relm
