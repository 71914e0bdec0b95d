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

#include "relm/engine/bench.hpp"

#include <chrono>
#include <sstream>

#include "relm/engine/queries.hpp"

namespace relm::bench {

const char *query_by_name(const std::string &name) {
  if (name == "q1") return kQ1;
  if (name == "q2") return kQ2;
  if (name == "q3") return kQ3;
  if (name == "q4") return kQ4;
  if (name == "q5") return kQ5;
  throw EngineError(ErrorCode::Config, "unknown benchmark query: " + name);
}

BenchReport run_bench(Engine &engine, const BenchOptions &options) {
  std::vector<std::string> suite =
      options.suite.empty() ? all_query_names() : options.suite;

  if (!options.use_existing_tables) {
    FixtureSpec spec;
    spec.reviews = options.rows;
    spec.seed = engine.config().seed;
    install_fixtures(engine.catalog(), spec);
  }

  bool needs_index = false;
  for (const auto &name : suite) {
    if (name == "q5") needs_index = true;
  }
  if (needs_index && engine.catalog().has_table("squad")) {
    engine.build_vector_index("squad", "context");
  }

  BenchReport report;
  report.doc = {{"version", 1},
                {"seed", engine.config().seed},
                {"rows", options.rows},
                {"window", engine.config().scheduler.window},
                {"queries", nlohmann::json::array()}};

  std::ostringstream table;
  table << "query   status  rows_out  llm_calls  prompt_tok  output_tok  "
           "dedup_hits  busy_frac  makespan_us  wall_ms\n";

  for (const auto &name : suite) {
    nlohmann::json entry = {{"name", name}};
    auto wall_start = std::chrono::steady_clock::now();
    try {
      auto prepared = engine.prepare(query_by_name(name));
      auto result = engine.run(prepared.optimized);
      double wall_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - wall_start).count();
      const auto &m = result.metrics;
      entry["status"] = "ok";
      entry["rows_out"] = result.table.row_count();
      entry["wall_ms"] = wall_ms;
      entry["metrics"] = m.to_json();

      std::ostringstream busy;
      busy.precision(4);
      busy << std::fixed << m.scheduler.busy_fraction();
      table << name << "      ok      " << result.table.row_count() << "\t"
            << m.scheduler.backend_calls << "\t" << m.scheduler.prompt_tokens
            << "\t" << m.scheduler.output_tokens << "\t"
            << m.scheduler.dedup_hits << "\t" << busy.str() << "\t"
            << m.scheduler.makespan_us << "\t"
            << static_cast<int64_t>(wall_ms) << "\n";
    } catch (const EngineError &e) {
      report.any_failed = true;
      entry["status"] = "error";
      entry["error_code"] = error_code_name(e.code());
      entry["error"] = e.what();
      table << name << "      ERROR   " << error_code_name(e.code()) << ": "
            << e.what() << "\n";
    }
    report.doc["queries"].push_back(std::move(entry));
  }
  report.table_text = table.str();
  return report;
}

}  // namespace relm::bench
