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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relm/catalog/csv.hpp"
#include "relm/engine/bench.hpp"
#include "relm/engine/engine.hpp"
#include "relm/engine/queries.hpp"

namespace {

using namespace relm;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EngineError(ErrorCode::FileNotFound, "no such file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string load_query_text(const std::string &file, const std::string &inline_text) {
  if (!inline_text.empty()) return inline_text;
  if (file.empty()) {
    throw EngineError(ErrorCode::Config,
                      "provide a query file or --query \"...\"");
  }
  return read_file(file);
}

EngineConfig load_config(const std::string &config_path,
                         const std::string &backend_override,
                         int64_t seed_override, int window_override) {
  EngineConfig config;
  if (!config_path.empty()) {
    config = EngineConfig::from_file(config_path);
  } else if (std::filesystem::exists("engine.ini")) {
    config = EngineConfig::from_file("engine.ini");
  } else {
    config = EngineConfig::from_ini(IniDoc::parse(""));
  }
  if (backend_override == "mock") {
    config.backend.kind = BackendKind::Mock;
  } else if (backend_override == "http") {
    config.backend.kind = BackendKind::OpenAiCompatibleHttp;
  } else if (!backend_override.empty()) {
    throw EngineError(ErrorCode::Config,
                      "unknown --backend: " + backend_override);
  }
  if (seed_override >= 0) {
    config.seed = static_cast<uint64_t>(seed_override);
    config.mock.seed = config.seed;
    config.scheduler.seed = config.seed;
  }
  if (window_override > 0) config.scheduler.window = window_override;
  return config;
}

void print_result_csv(const Table &table, std::ostream &out) {
  std::vector<std::string> fields;
  for (const auto &col : table.schema().columns()) fields.push_back(col.name);
  write_csv_record(out, fields);
  for (const auto &row : table.rows()) {
    fields.clear();
    for (const auto &v : row) fields.push_back(v.to_text());
    write_csv_record(out, fields);
  }
}

void print_result_ndjson(const Table &table, std::ostream &out) {
  for (const auto &row : table.rows()) {
    nlohmann::json record = nlohmann::json::object();
    for (size_t c = 0; c < table.schema().arity(); ++c) {
      const auto &col = table.schema().column(c);
      const Value &v = row[c];
      if (v.is_null()) record[col.name] = nullptr;
      else if (v.is_int()) record[col.name] = v.as_int();
      else if (v.is_float()) record[col.name] = v.as_float();
      else if (v.is_bool()) record[col.name] = v.as_bool();
      else record[col.name] = v.to_text();
    }
    out << record.dump() << "\n";
  }
}

int cmd_ingest(Engine &engine, const std::string &table,
               const std::string &csv_path, const std::string &embed_column) {
  try {
    engine.load_catalog_dir();
    auto loaded = engine.catalog().load_csv(csv_path, table);
    engine.save_catalog_dir();
    std::cout << table << ": " << loaded->row_count() << " rows, "
              << loaded->schema().arity() << " columns\n";
    for (const auto &col : loaded->schema().columns()) {
      auto stats = engine.catalog().column_stats(table, col.name);
      std::cout << "  " << col.name << " (" << column_type_name(col.type)
                << "): distinct=" << stats.distinct_count
                << " nulls=" << stats.null_count << "\n";
    }
    if (!embed_column.empty()) {
      engine.build_vector_index(table, embed_column);
      std::cout << "index built: " << engine.index_path(table, embed_column)
                << " (" << engine.vector_index()->size() << " entries, dim "
                << engine.vector_index()->dimension() << ")\n";
    }
    return 0;
  } catch (const EngineError &e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
}

int cmd_run(Engine &engine, const std::string &query, bool canonical,
            const std::string &format, const std::string &metrics_out) {
  try {
    engine.load_catalog_dir();
  } catch (const EngineError &e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
  try {
    auto prepared = engine.prepare(query);
    auto result = engine.run(canonical ? prepared.canonical : prepared.optimized);
    if (format == "json") {
      print_result_ndjson(result.table, std::cout);
    } else {
      print_result_csv(result.table, std::cout);
    }
    std::cerr << result.metrics.scheduler.to_table();
    std::string metrics = result.metrics.to_json().dump(2);
    if (metrics_out.empty()) {
      std::cerr << metrics << "\n";
    } else {
      std::ofstream out(metrics_out, std::ios::trunc);
      out << metrics << "\n";
    }
    return 0;
  } catch (const EngineError &e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ", column " << e.column() << ")";
    std::cerr << "\n";
    return exit_code_for(e);
  }
}

int cmd_explain(Engine &engine, const std::string &query, bool canonical) {
  try {
    engine.load_catalog_dir();
    std::cout << engine.explain_text(query, canonical);
    return 0;
  } catch (const EngineError &e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ", column " << e.column() << ")";
    std::cerr << "\n";
    return exit_code_for(e);
  }
}

int cmd_bench(Engine &engine, const std::string &suite_arg, int64_t rows,
              const std::string &report_path) {
  try {
    bench::BenchOptions options;
    options.rows = rows;
    if (!suite_arg.empty()) {
      std::istringstream in(suite_arg);
      std::string name;
      while (std::getline(in, name, ',')) options.suite.push_back(name);
    }
    auto report = bench::run_bench(engine, options);
    std::cout << report.table_text;
    if (!report_path.empty()) {
      std::ofstream out(report_path, std::ios::trunc);
      out << report.doc.dump(2) << "\n";
      std::cout << "report written to " << report_path << "\n";
    } else {
      std::cerr << report.doc.dump(2) << "\n";
    }
    return report.any_failed ? 5 : 0;
  } catch (const EngineError &e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"relm — a relational query engine for LLM-invoking SQL"};
  app.require_subcommand(1);

  std::string config_path, backend_override;
  int64_t seed_override = -1;
  int window_override = 0;
  app.add_option("--config", config_path, "engine config file (INI)");
  app.add_option("--backend", backend_override, "backend override: mock|http");
  app.add_option("--seed", seed_override, "seed override");
  app.add_option("--window", window_override, "scheduler in-flight window");

  auto *ingest = app.add_subcommand("ingest", "load a CSV into the catalog");
  std::string table, csv_path, embed_column;
  ingest->add_option("table", table, "table name")->required();
  ingest->add_option("csv", csv_path, "CSV file path")->required();
  ingest->add_option("--embed", embed_column,
                     "build a vector index over this column");

  auto *run = app.add_subcommand("run", "execute a query");
  std::string run_file, run_query, format = "csv", metrics_out;
  bool run_canonical = false, no_validate = false, no_dedup = false;
  run->add_option("file", run_file, "query file");
  run->add_option("--query", run_query, "inline query text");
  run->add_option("--format", format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--metrics-out", metrics_out, "metrics sidecar file");
  run->add_flag("--canonical", run_canonical, "execute the un-optimized plan");
  run->add_flag("--no-validate", no_validate,
                "diagnostic: disable output validation");
  run->add_flag("--no-dedup", no_dedup, "disable the per-query dedup cache");

  auto *explain = app.add_subcommand("explain", "print the query plan");
  std::string explain_file, explain_query;
  bool explain_canonical = false;
  explain->add_option("file", explain_file, "query file");
  explain->add_option("--query", explain_query, "inline query text");
  explain->add_flag("--canonical", explain_canonical,
                    "print the pre-optimization plan");

  auto *fixtures_cmd = app.add_subcommand(
      "fixtures", "write seeded synthetic movies/reviews/squad CSVs");
  std::string fixtures_dir = ".";
  int64_t fixture_rows = 1000;
  fixtures_cmd->add_option("--rows", fixture_rows, "reviews row count");
  fixtures_cmd->add_option("--dir", fixtures_dir, "output directory");

  auto *bench_cmd = app.add_subcommand("bench", "run the five-query suite");
  std::string suite, report_path;
  int64_t rows = 1000;
  bench_cmd->add_option("--suite", suite, "comma-separated subset, e.g. q1,q5");
  bench_cmd->add_option("--rows", rows, "fixture size (reviews rows)");
  bench_cmd->add_option("--report", report_path, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    EngineConfig config =
        load_config(config_path, backend_override, seed_override, window_override);
    if (no_validate) config.scheduler.validate_outputs = false;
    if (no_dedup) config.exec.dedup_enabled = false;
    Engine engine(config);

    if (*ingest) return cmd_ingest(engine, table, csv_path, embed_column);
    if (*run) {
      return cmd_run(engine, load_query_text(run_file, run_query),
                     run_canonical, format, metrics_out);
    }
    if (*explain) {
      return cmd_explain(engine, load_query_text(explain_file, explain_query),
                         explain_canonical);
    }
    if (*fixtures_cmd) {
      bench::FixtureSpec spec;
      spec.reviews = fixture_rows;
      spec.seed = config.seed;
      std::filesystem::create_directories(fixtures_dir);
      for (auto &[name, table] :
           {std::pair<std::string, std::shared_ptr<const Table>>{
                "movies", bench::make_movies(spec)},
            {"reviews", bench::make_reviews(spec)},
            {"squad", bench::make_squad(spec)}}) {
        std::ofstream out(std::filesystem::path(fixtures_dir) / (name + ".csv"),
                          std::ios::trunc);
        write_table_csv(*table, out);
        std::cout << name << ".csv: " << table->row_count() << " rows\n";
      }
      return 0;
    }
    if (*bench_cmd) return cmd_bench(engine, suite, rows, report_path);
  } catch (const EngineError &e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
