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

#include "relm/sched/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace relm {

void SchedulerMetrics::merge(const SchedulerMetrics &other) {
  rows_submitted += other.rows_submitted;
  backend_calls += other.backend_calls;
  retries += other.retries;
  dedup_hits += other.dedup_hits;
  envelopes_constrained += other.envelopes_constrained;
  envelopes_unconstrained += other.envelopes_unconstrained;
  prompt_tokens += other.prompt_tokens;
  output_tokens += other.output_tokens;
  validation_failures += other.validation_failures;
  rows_nulled += other.rows_nulled;
  truncation_warnings += other.truncation_warnings;
  constraint_fallbacks += other.constraint_fallbacks;
  max_in_flight = std::max(max_in_flight, other.max_in_flight);
  max_attempts_per_row = std::max(max_attempts_per_row, other.max_attempts_per_row);
  // Operators run one after another, so busy time and makespan add.
  busy_us += other.busy_us;
  makespan_us += other.makespan_us;
  simulated_clock = simulated_clock && other.simulated_clock;
  envelope_latencies_us.insert(envelope_latencies_us.end(),
                               other.envelope_latencies_us.begin(),
                               other.envelope_latencies_us.end());
}

nlohmann::json SchedulerMetrics::to_json() const {
  return {
      {"rows_submitted", rows_submitted},
      {"backend_calls", backend_calls},
      {"retries", retries},
      {"dedup_hits", dedup_hits},
      {"envelopes", {{"constrained", envelopes_constrained},
                     {"unconstrained", envelopes_unconstrained}}},
      {"prompt_tokens", prompt_tokens},
      {"output_tokens", output_tokens},
      {"validation_failures", validation_failures},
      {"rows_nulled", rows_nulled},
      {"truncation_warnings", truncation_warnings},
      {"constraint_fallbacks", constraint_fallbacks},
      {"max_in_flight", max_in_flight},
      {"max_attempts_per_row", max_attempts_per_row},
      {"busy_us", busy_us},
      {"makespan_us", makespan_us},
      {"busy_fraction", busy_fraction()},
      {"simulated_clock", simulated_clock},
      {"envelope_latencies_us", envelope_latencies_us},
  };
}

std::string SchedulerMetrics::to_table() const {
  std::ostringstream out;
  auto row = [&](const std::string &k, const std::string &v) {
    out << "  " << k;
    for (size_t i = k.size(); i < 24; ++i) out << ' ';
    out << v << "\n";
  };
  out << "scheduler metrics (" << (simulated_clock ? "simulated" : "wall")
      << " clock)\n";
  row("rows submitted", std::to_string(rows_submitted));
  row("backend calls", std::to_string(backend_calls));
  row("retries", std::to_string(retries));
  row("dedup hits", std::to_string(dedup_hits));
  row("envelopes constrained", std::to_string(envelopes_constrained));
  row("envelopes unconstrained", std::to_string(envelopes_unconstrained));
  row("prompt tokens", std::to_string(prompt_tokens));
  row("output tokens", std::to_string(output_tokens));
  row("validation failures", std::to_string(validation_failures));
  row("rows nulled", std::to_string(rows_nulled));
  row("max in flight", std::to_string(max_in_flight));
  row("makespan (us)", std::to_string(makespan_us));
  {
    std::ostringstream frac;
    frac.precision(4);
    frac << std::fixed << busy_fraction();
    row("busy fraction", frac.str());
  }
  return out.str();
}

}  // namespace relm
