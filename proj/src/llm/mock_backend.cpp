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

#include "relm/llm/mock_backend.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>

#include "relm/common/hash.hpp"
#include "relm/common/tokens.hpp"
#include "relm/llm/prompt.hpp"

namespace relm {

namespace {

std::string hex64(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

int count_occurrences(const std::string &haystack, const std::string &needle) {
  int count = 0;
  size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string faithful_output(const InferenceRequest &request, uint64_t h) {
  const OutputContract &c = request.contract;
  switch (c.kind) {
    case ContractKind::Choice:
      return c.choices[h % c.choices.size()];
    case ContractKind::IntRange: {
      uint64_t span = static_cast<uint64_t>(c.hi - c.lo) + 1;
      return std::to_string(c.lo + static_cast<int64_t>(h % span));
    }
    case ContractKind::SchemaText: {
      nlohmann::json doc = nlohmann::json::object();
      uint64_t field_hash = h;
      for (const auto &field : c.fields) {
        field_hash = splitmix64(field_hash);
        switch (field.type) {
          case ColumnType::Text:
            doc[field.name] = "v" + hex64(field_hash).substr(0, 8);
            break;
          case ColumnType::Int64:
            doc[field.name] = static_cast<int64_t>(field_hash % 100);
            break;
          case ColumnType::Float64:
            doc[field.name] = static_cast<double>(field_hash % 1000) / 10.0;
            break;
          case ColumnType::Bool:
            doc[field.name] = (field_hash & 1) != 0;
            break;
          case ColumnType::Vector:
            doc[field.name] = nullptr;
            break;
        }
      }
      return doc.dump();
    }
    case ContractKind::FreeText:
      return "Synthesized completion " + hex64(h) +
             " derived from the supplied fields.";
  }
  return hex64(h);
}

}  // namespace

MockBackend::MockBackend(MockConfig config) : config_(config) {
  descriptor_.kind = BackendKind::Mock;
  descriptor_.model = "mock";
  descriptor_.dialect = ConstraintDialect::None;
}

std::string MockBackend::generate(const InferenceRequest &request) const {
  // Combined call: answer every item, the way a compliant model would.
  std::vector<std::string> items = split_combined_prompt(request.rendered_prompt);
  if (!items.empty()) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
      InferenceRequest sub = request;
      sub.rendered_prompt = items[i];
      if (i) out += "\n";
      out += std::to_string(i + 1) + ": " + generate(sub);
    }
    return out;
  }

  uint64_t h = fnv1a64(request.rendered_prompt);
  std::string out = faithful_output(request, h);
  if (config_.mode == MockMode::Noisy) {
    // Reinforcement lines appended by retries reduce the noise probability
    // multiplicatively; see the class comment.
    int reinforcements = count_occurrences(request.rendered_prompt, kRetryMarker);
    double p = std::pow(config_.noise_p, 1 + reinforcements);
    Rng rng(hash_combine(config_.seed, splitmix64(h ^ 0x6e6f697365ULL)));
    if (rng.next_double() < p) {
      out += kNoiseSuffix;
    }
  }
  return out;
}

int64_t MockBackend::service_time_us(const InferenceRequest &request) const {
  const ServiceTimeModel &m = config_.service;
  if (m.kind == ServiceTimeKind::Fixed) return m.fixed_us;
  uint64_t h = hash_combine(hash_combine(config_.seed, 0x73766374ULL),
                            fnv1a64(request.rendered_prompt));
  Rng rng(h);
  switch (m.kind) {
    case ServiceTimeKind::Uniform:
      return rng.next_int(m.lo_us, m.hi_us);
    case ServiceTimeKind::Exponential: {
      double u = rng.next_double();
      double t = -m.mean_us * std::log1p(-u);
      return std::max<int64_t>(1, static_cast<int64_t>(t));
    }
    case ServiceTimeKind::Fixed:
      break;
  }
  return m.fixed_us;
}

BackendResult MockBackend::make_result(const InferenceRequest &request) const {
  BackendResult result;
  result.text = generate(request);
  result.usage.prompt_tokens = estimate_tokens(request.system_prompt) +
                               estimate_tokens(request.rendered_prompt);
  result.usage.output_tokens = estimate_tokens(result.text);
  result.usage.estimated = true;
  return result;
}

BackendResult MockBackend::invoke(const InferenceRequest &request) {
  call_count_.fetch_add(1, std::memory_order_relaxed);
  if (config_.real_sleep) {
    std::this_thread::sleep_for(
        std::chrono::microseconds(service_time_us(request)));
  }
  return make_result(request);
}

std::optional<Backend::SimulatedCall> MockBackend::simulate(
    const InferenceRequest &request) {
  call_count_.fetch_add(1, std::memory_order_relaxed);
  return SimulatedCall{make_result(request), service_time_us(request)};
}

}  // namespace relm
