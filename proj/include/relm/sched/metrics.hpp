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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace relm {

/// Run report for one scheduler execution (or the merge of several, one per
/// LLM operator). With the simulated clock all time fields are virtual and
/// byte-identical across runs for a fixed seed; busy_fraction is the
/// utilization proxy: backend busy time / makespan under the mock's service
/// model.
struct SchedulerMetrics {
  int64_t rows_submitted = 0;
  int64_t backend_calls = 0;
  int64_t retries = 0;
  int64_t dedup_hits = 0;
  int64_t envelopes_constrained = 0;
  int64_t envelopes_unconstrained = 0;
  int64_t prompt_tokens = 0;
  int64_t output_tokens = 0;
  int64_t validation_failures = 0;
  int64_t rows_nulled = 0;
  int64_t truncation_warnings = 0;
  int64_t constraint_fallbacks = 0;
  int64_t max_in_flight = 0;
  int64_t max_attempts_per_row = 0;
  int64_t busy_us = 0;
  int64_t makespan_us = 0;
  bool simulated_clock = true;
  std::vector<int64_t> envelope_latencies_us;

  double busy_fraction() const {
    return makespan_us > 0
               ? static_cast<double>(busy_us) / static_cast<double>(makespan_us)
               : 0.0;
  }

  void merge(const SchedulerMetrics &other);

  nlohmann::json to_json() const;
  std::string to_table() const;
};

}  // namespace relm
