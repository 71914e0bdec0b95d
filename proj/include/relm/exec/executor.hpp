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
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "relm/catalog/catalog.hpp"
#include "relm/exec/dedup_cache.hpp"
#include "relm/plan/logical_plan.hpp"
#include "relm/sched/scheduler.hpp"
#include "relm/vec/index.hpp"

namespace relm::exec {

struct ExecConfig {
  bool dedup_enabled = true;
  size_t morsel_size = 128;
  std::string context_separator = "\n---\n";
  int64_t free_text_output_tokens = 256;
  int64_t constrained_output_tokens = 8;
};

/// Per-run counters attached to every execution, merged with the scheduler
/// report. sim_candidate_rows counts the (row, context) pairs materialized
/// by top-k probes: N * k for a probe plan, never N * M.
struct RunMetrics {
  SchedulerMetrics scheduler;
  int64_t embed_calls = 0;
  int64_t sim_candidate_rows = 0;
  int64_t peak_intermediate_rows = 0;
  int64_t dedup_cache_hits = 0;
  int64_t dedup_cache_lookups = 0;

  nlohmann::json to_json() const;
};

struct ExecResult {
  Table table;
  RunMetrics metrics;
};

/// Executes optimized (or canonical) plans. Relational operators run
/// single-threaded over wide rows in morsel-sized steps; LLM operators reach
/// concurrency exclusively through the scheduler's in-flight window. The
/// dedup cache is per-query.
class Executor {
 public:
  Executor(const Catalog &catalog, Backend &backend,
           SchedulerConfig scheduler_config, ExecConfig exec_config,
           const VectorIndex *index = nullptr, Embedder *embedder = nullptr)
      : catalog_(catalog),
        backend_(backend),
        scheduler_config_(scheduler_config),
        config_(exec_config),
        index_(index),
        embedder_(embedder) {}

  ExecResult execute(const plan::LogicalPlan &plan);

 private:
  const Catalog &catalog_;
  Backend &backend_;
  SchedulerConfig scheduler_config_;
  ExecConfig config_;
  const VectorIndex *index_;
  Embedder *embedder_;
};

}  // namespace relm::exec
