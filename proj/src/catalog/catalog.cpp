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

#include "relm/catalog/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <unordered_set>

#include "relm/catalog/csv.hpp"
#include "relm/common/error.hpp"
#include "relm/common/ini.hpp"

namespace relm {

namespace fs = std::filesystem;

void Table::append_row(Row row) {
  if (row.size() != schema_.arity()) {
    throw EngineError(ErrorCode::SchemaMismatch,
                      "row has " + std::to_string(row.size()) +
                          " values, schema expects " +
                          std::to_string(schema_.arity()));
  }
  rows_.push_back(std::move(row));
}

std::optional<size_t> Schema::index_of(const std::string &name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

namespace {

constexpr size_t kInferenceSampleRows = 1000;

bool all_parse_as(const std::vector<std::vector<std::string>> &sample,
                  size_t col, ColumnType type) {
  bool saw_value = false;
  for (const auto &row : sample) {
    const std::string &text = row[col];
    if (text.empty()) continue;  // NULL matches every type
    saw_value = true;
    try {
      parse_value(text, type);
    } catch (const EngineError &) {
      return false;
    }
  }
  // An all-null column stays text.
  return saw_value || type == ColumnType::Text;
}

}  // namespace

Schema infer_schema(const std::vector<std::string> &header,
                    const std::vector<std::vector<std::string>> &sample) {
  std::vector<ColumnDef> columns;
  columns.reserve(header.size());
  for (size_t col = 0; col < header.size(); ++col) {
    ColumnType type = ColumnType::Text;
    for (ColumnType candidate :
         {ColumnType::Int64, ColumnType::Float64, ColumnType::Bool}) {
      if (all_parse_as(sample, col, candidate)) {
        type = candidate;
        break;
      }
    }
    columns.push_back({header[col], type});
  }
  return Schema(std::move(columns));
}

std::shared_ptr<const Table> Catalog::load_csv(const std::string &path,
                                               const std::string &table_name,
                                               std::optional<Schema> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EngineError(ErrorCode::FileNotFound, "no such file: " + path);
  }

  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) {
    throw EngineError(ErrorCode::SchemaMismatch, "file has no header: " + path);
  }

  // Buffer a sample for inference, then stream the rest.
  std::vector<std::vector<std::string>> buffered;
  std::vector<std::string> record;
  while (buffered.size() < kInferenceSampleRows && reader.next(record)) {
    buffered.push_back(record);
  }

  Schema resolved = schema ? std::move(*schema) : infer_schema(header, buffered);
  if (resolved.arity() != header.size()) {
    throw EngineError(ErrorCode::SchemaMismatch,
                      "schema arity " + std::to_string(resolved.arity()) +
                          " does not match header arity " +
                          std::to_string(header.size()));
  }

  auto table = std::make_shared<Table>(table_name, resolved);
  auto append = [&](const std::vector<std::string> &fields) {
    if (fields.size() != header.size()) {
      throw EngineError(ErrorCode::SchemaMismatch,
                        "row with " + std::to_string(fields.size()) +
                            " fields under a " + std::to_string(header.size()) +
                            "-column header in " + path);
    }
    Row row;
    row.reserve(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      row.push_back(parse_value(fields[i], resolved.column(i).type));
    }
    table->append_row(std::move(row));
  };

  for (const auto &fields : buffered) append(fields);
  while (reader.next(record)) append(record);

  register_table(table);
  return table;
}

void Catalog::register_table(std::shared_ptr<const Table> table) {
  std::unique_lock lock(mutex_);
  std::string name = table->name();
  tables_[name] = Entry{std::move(table), {}};
}

std::shared_ptr<const Table> Catalog::get_table(const std::string &name) const {
  std::shared_lock lock(mutex_);
  auto it = tables_.find(name);
  if (it == tables_.end()) {
    throw EngineError(ErrorCode::UnknownTable, "unknown table: " + name);
  }
  return it->second.table;
}

bool Catalog::has_table(const std::string &name) const {
  std::shared_lock lock(mutex_);
  return tables_.count(name) > 0;
}

ColumnStats scan_column_stats(const Table &table, size_t column_index) {
  ColumnStats stats;
  stats.column = table.schema().column(column_index).name;
  std::unordered_set<uint64_t> seen;
  double text_chars = 0;
  int64_t non_null = 0;
  for (const auto &row : table.rows()) {
    const Value &v = row[column_index];
    if (v.is_null()) {
      ++stats.null_count;
      continue;
    }
    ++non_null;
    seen.insert(v.hash());
    text_chars += static_cast<double>(v.to_text().size());
  }
  stats.distinct_count = static_cast<int64_t>(seen.size());
  stats.avg_text_length = non_null ? text_chars / static_cast<double>(non_null) : 0.0;
  return stats;
}

ColumnStats Catalog::column_stats(const std::string &table,
                                  const std::string &column) const {
  {
    std::shared_lock lock(mutex_);
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      throw EngineError(ErrorCode::UnknownTable, "unknown table: " + table);
    }
    auto cached = it->second.stats.find(column);
    if (cached != it->second.stats.end()) return cached->second;
  }

  auto tbl = get_table(table);
  auto idx = tbl->schema().index_of(column);
  if (!idx) {
    throw EngineError(ErrorCode::UnknownColumn,
                      "unknown column: " + table + "." + column);
  }
  ColumnStats stats = scan_column_stats(*tbl, *idx);

  std::unique_lock lock(mutex_);
  auto it = tables_.find(table);
  // Only cache if the table was not replaced while scanning.
  if (it != tables_.end() && it->second.table == tbl) {
    it->second.stats[column] = stats;
  }
  return stats;
}

std::vector<std::string> Catalog::table_names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> names;
  names.reserve(tables_.size());
  for (const auto &[name, _] : tables_) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

void write_table_csv(const Table &table, std::ostream &out) {
  std::vector<std::string> fields;
  for (const auto &col : table.schema().columns()) fields.push_back(col.name);
  write_csv_record(out, fields);
  for (const auto &row : table.rows()) {
    fields.clear();
    for (const auto &v : row) fields.push_back(v.to_text());
    write_csv_record(out, fields);
  }
}

void Catalog::save(const std::string &dir) const {
  fs::create_directories(dir);
  IniDoc manifest;
  for (const auto &name : table_names()) {
    auto table = get_table(name);
    std::ofstream out(fs::path(dir) / (name + ".csv"),
                      std::ios::binary | std::ios::trunc);
    write_table_csv(*table, out);
    std::string columns;
    for (const auto &col : table->schema().columns()) {
      if (!columns.empty()) columns += ",";
      columns += col.name + ":" + column_type_name(col.type);
    }
    manifest.set(name, "columns", columns);
    manifest.set(name, "rows", std::to_string(table->row_count()));
  }
  manifest.write_file((fs::path(dir) / "manifest").string());
}

void Catalog::load(const std::string &dir) {
  IniDoc manifest = IniDoc::parse_file((fs::path(dir) / "manifest").string());
  for (const auto &name : manifest.section_names()) {
    auto columns = manifest.get(name, "columns");
    if (!columns) continue;
    std::vector<ColumnDef> defs;
    size_t pos = 0;
    while (pos < columns->size()) {
      size_t comma = columns->find(',', pos);
      if (comma == std::string::npos) comma = columns->size();
      std::string item = columns->substr(pos, comma - pos);
      size_t colon = item.rfind(':');
      if (colon == std::string::npos) {
        throw EngineError(ErrorCode::Config,
                          "malformed manifest column entry: " + item);
      }
      defs.push_back({item.substr(0, colon),
                      column_type_from_name(item.substr(colon + 1))});
      pos = comma + 1;
    }
    load_csv((fs::path(dir) / (name + ".csv")).string(), name,
             Schema(std::move(defs)));
  }
}

}  // namespace relm
