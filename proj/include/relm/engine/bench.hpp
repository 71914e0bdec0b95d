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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relm/engine/engine.hpp"
#include "relm/engine/fixtures.hpp"

namespace relm::bench {

struct BenchOptions {
  std::vector<std::string> suite;  // empty = q1..q5
  int64_t rows = 1000;
  bool use_existing_tables = false;  // skip fixture generation
};

struct BenchReport {
  // Versioned document (schema in docs/formats.md). Wall-clock fields
  // ("wall_ms") are the only nondeterministic parts under the mock backend.
  nlohmann::json doc;
  std::string table_text;
  bool any_failed = false;
};

BenchReport run_bench(Engine &engine, const BenchOptions &options);

}  // namespace relm::bench
