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
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "relm/catalog/table.hpp"

namespace relm {

/// Owns ingested tables and their exact per-column statistics. Tables are
/// immutable after registration; re-registering a name replaces the table
/// (and drops its cached stats). Reads are safe from any number of threads,
/// registration takes the write lock.
class Catalog {
 public:
  /// Loads a CSV file (first line is the header). When `schema` is absent,
  /// types are inferred from a 1000-row sample with int -> float -> bool ->
  /// text precedence; later nonconforming values raise TypeCoercionError.
  std::shared_ptr<const Table> load_csv(const std::string &path,
                                        const std::string &table_name,
                                        std::optional<Schema> schema = {});

  void register_table(std::shared_ptr<const Table> table);

  /// Case-sensitive lookup; throws UnknownTable.
  std::shared_ptr<const Table> get_table(const std::string &name) const;
  bool has_table(const std::string &name) const;

  /// Exact distinct/null counts; cached per (table, column) until the table
  /// is replaced. Throws UnknownTable / UnknownColumn.
  ColumnStats column_stats(const std::string &table,
                           const std::string &column) const;

  std::vector<std::string> table_names() const;

  /// Directory layout: one `<table>.csv` per table plus `manifest` with the
  /// schemas in key-value form.
  void save(const std::string &dir) const;
  void load(const std::string &dir);

 private:
  struct Entry {
    std::shared_ptr<const Table> table;
    // Stats cache, keyed by column name. Mutable through the catalog lock.
    mutable std::unordered_map<std::string, ColumnStats> stats;
  };

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Entry> tables_;
};

/// Computes exact stats with a full scan (also the test oracle's
/// definition: distinct over non-null values, nulls counted separately).
ColumnStats scan_column_stats(const Table &table, size_t column_index);

/// Writes a table in RFC-4180 form, header first. NULL serializes as the
/// empty field.
void write_table_csv(const Table &table, std::ostream &out);

/// Infers a schema from sample rows (int -> float -> bool -> text).
Schema infer_schema(const std::vector<std::string> &header,
                    const std::vector<std::vector<std::string>> &sample);

}  // namespace relm
