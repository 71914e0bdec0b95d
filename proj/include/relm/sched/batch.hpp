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
#include <vector>

#include "relm/llm/backend.hpp"

namespace relm {

enum class BatchClass { Constrained, Unconstrained };

/// A dispatch unit: one backend call covering one or more member requests.
/// Members always share the class — constrained and unconstrained work is
/// never mixed in one envelope.
struct BatchEnvelope {
  int64_t batch_id = 0;
  BatchClass cls = BatchClass::Unconstrained;
  std::vector<InferenceRequest> requests;
  int64_t prompt_token_sum = 0;
};

enum class RowsPerRequest { One, Budgeted };

struct AssembleOptions {
  RowsPerRequest mode = RowsPerRequest::One;
  int64_t token_budget = 0;  // Budgeted: prompt + reserved output bound
};

struct AssembleResult {
  std::vector<BatchEnvelope> envelopes;
  int64_t truncation_warnings = 0;  // single requests exceeding the budget
};

/// One mode: a singleton envelope per request. Budgeted mode: greedy fill in
/// arrival order until prompt tokens plus reserved output tokens would
/// exceed the budget; requests are never split and classes never mixed. A
/// single over-budget request gets its own envelope plus a warning.
AssembleResult assemble_batches(const std::vector<InferenceRequest> &pending,
                                const AssembleOptions &options,
                                int64_t first_batch_id = 0);

}  // namespace relm
