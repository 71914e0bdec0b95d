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

#include "relm/engine/engine.hpp"

#include <filesystem>

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"

namespace relm {

namespace fs = std::filesystem;

namespace {

ConstraintDialect dialect_from_name(const std::string &name) {
  if (name == "none") return ConstraintDialect::None;
  if (name == "json_schema") return ConstraintDialect::JsonSchemaResponseFormat;
  if (name == "guided") return ConstraintDialect::GuidedChoiceRegex;
  throw EngineError(ErrorCode::Config, "unknown constraint dialect: " + name);
}

}  // namespace

EngineConfig EngineConfig::from_ini(const IniDoc &doc) {
  EngineConfig config;

  config.seed = static_cast<uint64_t>(doc.get_int("engine", "seed", 42));
  config.catalog_dir = doc.get_or("engine", "catalog_dir", "catalog");
  config.exec.dedup_enabled = doc.get_bool("engine", "dedup", true);
  config.scheduler.validate_outputs = doc.get_bool("engine", "validate", true);
  config.exec.morsel_size = static_cast<size_t>(
      doc.get_int("engine", "morsel_size", 128));

  std::string kind = doc.get_or("backend", "kind", "mock");
  if (kind == "mock") {
    config.backend.kind = BackendKind::Mock;
  } else if (kind == "http") {
    config.backend.kind = BackendKind::OpenAiCompatibleHttp;
  } else {
    throw EngineError(ErrorCode::Config, "unknown backend kind: " + kind);
  }
  config.backend.endpoint = doc.get_or("backend", "endpoint", "");
  config.backend.model = doc.get_or("backend", "model", "");
  config.backend.api_key_env = doc.get_or("backend", "api_key_env", "");
  config.backend.dialect =
      dialect_from_name(doc.get_or("backend", "dialect", "none"));
  config.backend.timeout_ms =
      static_cast<int>(doc.get_int("backend", "timeout_ms", 30000));

  std::string mock_mode = doc.get_or("backend", "mock_mode", "faithful");
  if (mock_mode == "faithful") {
    config.mock.mode = MockMode::Faithful;
  } else if (mock_mode == "noisy") {
    config.mock.mode = MockMode::Noisy;
  } else {
    throw EngineError(ErrorCode::Config, "unknown mock mode: " + mock_mode);
  }
  config.mock.noise_p = doc.get_double("backend", "noise_p", 0.0);
  config.mock.seed = config.seed;
  config.mock.service.fixed_us =
      doc.get_int("backend", "mock_service_us", 10'000);

  config.scheduler.window =
      static_cast<int>(doc.get_int("scheduler", "window", 8));
  config.scheduler.context_window_tokens =
      doc.get_int("scheduler", "context_window_tokens", 128'000);
  config.scheduler.token_budget = doc.get_int("scheduler", "token_budget", 0);
  std::string mode = doc.get_or("scheduler", "rows_per_request", "one");
  if (mode == "one") {
    config.scheduler.rows_per_request = RowsPerRequest::One;
  } else if (mode == "budgeted") {
    config.scheduler.rows_per_request = RowsPerRequest::Budgeted;
  } else {
    throw EngineError(ErrorCode::Config, "unknown rows_per_request: " + mode);
  }
  config.scheduler.max_retries =
      static_cast<int>(doc.get_int("scheduler", "max_retries", 3));
  std::string policy = doc.get_or("scheduler", "on_exhausted", "null_value");
  if (policy == "null_value") {
    config.scheduler.on_exhausted = OnExhausted::NullValue;
  } else if (policy == "fail_query") {
    config.scheduler.on_exhausted = OnExhausted::FailQuery;
  } else {
    throw EngineError(ErrorCode::Config, "unknown on_exhausted: " + policy);
  }
  config.scheduler.seed = config.seed;
  config.scheduler.simulated_clock =
      doc.get_bool("scheduler", "simulated_clock", true);
  config.scheduler.sim_dispatch_us =
      doc.get_int("scheduler", "sim_dispatch_us", 1'000);
  config.scheduler.sim_validate_us =
      doc.get_int("scheduler", "sim_validate_us", 2'000);

  config.planner.c_prefill = doc.get_double("planner", "c_prefill", 1.0);
  config.planner.c_decode = doc.get_double("planner", "c_decode", 2.0);
  config.planner.epsilon = doc.get_double("planner", "epsilon", 1e-6);
  config.planner.free_text_decode_tokens =
      doc.get_int("planner", "free_text_decode_tokens", 256);
  config.planner.llm_selectivity =
      doc.get_double("planner", "llm_selectivity", 0.5);
  config.planner.r1_min_relative_gain =
      doc.get_double("planner", "r1_min_relative_gain", 1e-4);

  config.vector_dim =
      static_cast<size_t>(doc.get_int("vector", "dimension", 64));
  config.planner.default_k = doc.get_int("vector", "k", 3);
  std::string strategy = doc.get_or("vector", "strategy", "exact");
  if (strategy == "exact") {
    config.vector_strategy = IndexStrategy::ExactScan;
  } else if (strategy == "graph") {
    config.vector_strategy = IndexStrategy::GraphIndex;
  } else {
    throw EngineError(ErrorCode::Config, "unknown vector strategy: " + strategy);
  }
  config.graph.m = static_cast<int>(doc.get_int("vector", "m", 16));
  config.graph.ef_construction =
      static_cast<int>(doc.get_int("vector", "ef_construction", 200));
  config.graph.ef_search =
      static_cast<int>(doc.get_int("vector", "ef_search", 64));
  config.vector_index = doc.get_or("vector", "index", "");
  config.planner.rag_index = config.vector_index;

  config.contracts.choice_complement =
      doc.get_or("planner", "choice_complement", "No");
  config.contracts.aggregate_lo = doc.get_int("planner", "aggregate_lo", 0);
  config.contracts.aggregate_hi = doc.get_int("planner", "aggregate_hi", 5);

  return config;
}

EngineConfig EngineConfig::from_file(const std::string &path) {
  return from_ini(IniDoc::parse_file(path));
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  if (config_.backend.kind == BackendKind::Mock) {
    backend_ = std::make_unique<MockBackend>(config_.mock);
  } else {
    backend_ = std::make_unique<HttpBackend>(config_.backend);
    // Wall-clock dispatch against real services.
    config_.scheduler.simulated_clock = false;
  }
  embedder_ = std::make_unique<MockEmbedder>(
      config_.vector_dim, hash_combine(config_.seed, 0x656d6264ULL));
}

MockBackend *Engine::mock_backend() {
  return dynamic_cast<MockBackend *>(backend_.get());
}

Engine::Prepared Engine::prepare(const std::string &sql_text) {
  sql::QueryAst ast = sql::parse(sql_text);
  sql::BoundQuery bound = sql::bind(ast, catalog_, config_.contracts);

  if (bound.has_rag) {
    if (!index_) load_vector_index();
    if (!index_) {
      throw EngineError(ErrorCode::Plan,
                        "SIMILARITY_SEARCH requires a built vector index; run "
                        "ingest --embed first (configured index: '" +
                            config_.vector_index + "')");
    }
  }

  Prepared prepared{std::move(bound), {}, {}};
  prepared.canonical = plan::build_logical(prepared.bound, config_.planner);
  plan::StatsProvider stats(catalog_, prepared.bound.tables);
  plan::annotate_estimates(prepared.canonical, stats, config_.planner);
  prepared.optimized =
      plan::optimize(prepared.canonical, stats, config_.planner);
  return prepared;
}

exec::ExecResult Engine::run(const plan::LogicalPlan &plan) {
  exec::Executor executor(catalog_, *backend_, config_.scheduler, config_.exec,
                          index_ ? &*index_ : nullptr, embedder_.get());
  return executor.execute(plan);
}

std::string Engine::explain_text(const std::string &sql_text, bool canonical) {
  Prepared prepared = prepare(sql_text);
  return plan::explain(canonical ? prepared.canonical : prepared.optimized);
}

std::string Engine::index_path(const std::string &table,
                               const std::string &column) const {
  return (fs::path(config_.catalog_dir) / (table + "." + column + ".vidx"))
      .string();
}

void Engine::build_vector_index(const std::string &table,
                                const std::string &column) {
  auto tbl = catalog_.get_table(table);
  if (tbl->row_count() == 0) {
    // Degenerate corpus: an empty index keeps RAG plans executable (zero
    // probes); build_index itself treats an empty table as an error.
    if (!tbl->schema().index_of(column)) {
      throw EngineError(ErrorCode::UnknownColumn,
                        "unknown column: " + table + "." + column);
    }
    index_.emplace(embedder_->dimension(), config_.vector_strategy,
                   config_.graph, hash_combine(config_.seed, 0x76696478ULL));
    index_->finalize();
  } else {
    index_ = ::relm::build_index(*tbl, column, *embedder_,
                                 config_.vector_strategy, config_.graph,
                                 hash_combine(config_.seed, 0x76696478ULL));
  }
  config_.vector_index = table + "." + column;
  config_.planner.rag_index = config_.vector_index;
  fs::create_directories(config_.catalog_dir);
  index_->save(index_path(table, column));
}

bool Engine::load_vector_index() {
  if (config_.vector_index.empty()) {
    // No index configured: adopt the catalog's only persisted index, if any.
    if (!fs::is_directory(config_.catalog_dir)) return false;
    std::vector<std::string> found;
    for (const auto &entry : fs::directory_iterator(config_.catalog_dir)) {
      if (entry.path().extension() == ".vidx") {
        found.push_back(entry.path().stem().string());  // "table.column"
      }
    }
    if (found.size() != 1) return false;
    config_.vector_index = found[0];
    config_.planner.rag_index = found[0];
  }
  auto dot = config_.vector_index.find('.');
  if (dot == std::string::npos) {
    throw EngineError(ErrorCode::Config,
                      "vector.index must be table.column, got: " +
                          config_.vector_index);
  }
  std::string path = index_path(config_.vector_index.substr(0, dot),
                                config_.vector_index.substr(dot + 1));
  if (!fs::exists(path)) return false;
  index_ = VectorIndex::load(path);
  return true;
}

void Engine::load_catalog_dir() {
  if (fs::exists(fs::path(config_.catalog_dir) / "manifest")) {
    catalog_.load(config_.catalog_dir);
  }
}

void Engine::save_catalog_dir() { catalog_.save(config_.catalog_dir); }

int exit_code_for(const EngineError &error) {
  switch (error.code()) {
    case ErrorCode::Syntax:
    case ErrorCode::UnsupportedFeature:
      return 3;
    case ErrorCode::UnknownTable:
    case ErrorCode::UnknownColumn:
    case ErrorCode::AmbiguousColumn:
    case ErrorCode::PlaceholderArityMismatch:
    case ErrorCode::ContractConflict:
    case ErrorCode::Plan:
      return 4;
    case ErrorCode::FileNotFound:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::Config:
      return 2;
    default:
      return 5;
  }
}

}  // namespace relm
