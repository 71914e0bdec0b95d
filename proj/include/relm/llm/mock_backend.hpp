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

#include <atomic>
#include <cstdint>

#include "relm/llm/backend.hpp"

namespace relm {

enum class MockMode { Faithful, Noisy };

enum class ServiceTimeKind { Fixed, Uniform, Exponential };

struct ServiceTimeModel {
  ServiceTimeKind kind = ServiceTimeKind::Fixed;
  int64_t fixed_us = 10'000;
  int64_t lo_us = 5'000, hi_us = 20'000;  // Uniform
  double mean_us = 10'000.0;              // Exponential
};

struct MockConfig {
  MockMode mode = MockMode::Faithful;
  double noise_p = 0.0;  // Noisy: probability of appending extra text
  uint64_t seed = 42;
  ServiceTimeModel service;
  bool real_sleep = false;  // invoke() sleeps the service time (threaded runs)
};

/// Deterministic stand-in for a serving engine. Output is a pure function of
/// the rendered prompt's 64-bit hash, mapped into the contract's value space.
///
/// Noisy mode appends an explanatory suffix with probability p, which breaks
/// exact-match validation the way real unconstrained endpoints do. Each retry
/// appends one more reinforcement line to the prompt; the mock counts those
/// lines and draws noise with probability p^(1 + reinforcements), modelling
/// instructions that increasingly take. p = 1 therefore stays noisy on every
/// attempt, which keeps retry-exhaustion paths deterministic.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockConfig config);

  const BackendDescriptor &descriptor() const override { return descriptor_; }

  BackendResult invoke(const InferenceRequest &request) override;
  std::optional<SimulatedCall> simulate(const InferenceRequest &request) override;

  /// Pure generation, exposed for test oracles.
  std::string generate(const InferenceRequest &request) const;
  int64_t service_time_us(const InferenceRequest &request) const;

  int64_t call_count() const { return call_count_.load(); }
  void reset_call_count() { call_count_.store(0); }

  const MockConfig &config() const { return config_; }

 private:
  BackendResult make_result(const InferenceRequest &request) const;

  MockConfig config_;
  BackendDescriptor descriptor_;
  std::atomic<int64_t> call_count_{0};
};

/// Suffix the Noisy mode appends; reproduces the extra-text failure mode.
inline constexpr const char *kNoiseSuffix =
    " — this conclusion follows from the details in the provided text.";

}  // namespace relm
