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

#include <memory>
#include <optional>
#include <string>

#include "relm/catalog/catalog.hpp"
#include "relm/common/ini.hpp"
#include "relm/exec/executor.hpp"
#include "relm/llm/http_backend.hpp"
#include "relm/llm/mock_backend.hpp"
#include "relm/plan/planner.hpp"
#include "relm/sched/scheduler.hpp"
#include "relm/sql/binder.hpp"
#include "relm/sql/parser.hpp"
#include "relm/vec/index.hpp"

namespace relm {

/// Whole-engine configuration, loadable from an INI file with sections
/// [backend], [scheduler], [planner], [vector], [engine]. Defaults are
/// documented in the README; a fixed seed makes mock runs fully
/// deterministic.
struct EngineConfig {
  BackendDescriptor backend;
  MockConfig mock;
  SchedulerConfig scheduler;
  plan::PlannerConfig planner;
  exec::ExecConfig exec;
  sql::ContractDefaults contracts;

  size_t vector_dim = 64;
  IndexStrategy vector_strategy = IndexStrategy::ExactScan;
  GraphParams graph;
  std::string vector_index;  // "table.column"

  std::string catalog_dir = "catalog";
  uint64_t seed = 42;

  static EngineConfig from_ini(const IniDoc &doc);
  static EngineConfig from_file(const std::string &path);
};

/// Ties the pieces together for the CLI, the benchmark suite and the tests:
/// one catalog, one backend, one optional vector index per process.
class Engine {
 public:
  explicit Engine(EngineConfig config);

  Catalog &catalog() { return catalog_; }
  const EngineConfig &config() const { return config_; }
  Backend &backend() { return *backend_; }
  MockBackend *mock_backend();
  Embedder &embedder() { return *embedder_; }

  struct Prepared {
    sql::BoundQuery bound;
    plan::LogicalPlan canonical;
    plan::LogicalPlan optimized;
  };

  /// parse + bind + plan + optimize. Throws parse/bind/plan errors.
  Prepared prepare(const std::string &sql_text);

  exec::ExecResult run(const plan::LogicalPlan &plan);

  std::string explain_text(const std::string &sql_text, bool canonical);

  /// Builds the index for `table.column`, persists it next to the catalog,
  /// and makes it the active RAG index.
  void build_vector_index(const std::string &table, const std::string &column);

  /// Loads the configured index from the catalog directory when present.
  bool load_vector_index();

  const VectorIndex *vector_index() const {
    return index_ ? &*index_ : nullptr;
  }

  void load_catalog_dir();
  void save_catalog_dir();

  std::string index_path(const std::string &table,
                         const std::string &column) const;

 private:
  EngineConfig config_;
  Catalog catalog_;
  std::unique_ptr<Backend> backend_;
  std::unique_ptr<Embedder> embedder_;
  std::optional<VectorIndex> index_;
};

/// Maps an engine error to the documented CLI exit code: 2 file/config, 3
/// parse, 4 bind/plan, 5 execution.
int exit_code_for(const EngineError &error);

}  // namespace relm
