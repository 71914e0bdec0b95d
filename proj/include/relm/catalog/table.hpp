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
#include <optional>
#include <string>
#include <vector>

#include "relm/common/value.hpp"

namespace relm {

struct ColumnDef {
  std::string name;
  ColumnType type;

  bool operator==(const ColumnDef &) const = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnDef> columns) : columns_(std::move(columns)) {}

  size_t arity() const { return columns_.size(); }
  const std::vector<ColumnDef> &columns() const { return columns_; }
  const ColumnDef &column(size_t i) const { return columns_[i]; }

  /// Case-sensitive lookup.
  std::optional<size_t> index_of(const std::string &name) const;

  bool operator==(const Schema &) const = default;

 private:
  std::vector<ColumnDef> columns_;
};

using Row = std::vector<Value>;

/// Immutable once registered in the catalog; rows are stored in ingest order.
class Table {
 public:
  Table() = default;
  Table(std::string name, Schema schema)
      : name_(std::move(name)), schema_(std::move(schema)) {}

  const std::string &name() const { return name_; }
  const Schema &schema() const { return schema_; }
  const std::vector<Row> &rows() const { return rows_; }
  size_t row_count() const { return rows_.size(); }

  /// Appends a row; arity must match the schema.
  void append_row(Row row);

  const Value &at(size_t row, size_t col) const { return rows_[row][col]; }

 private:
  std::string name_;
  Schema schema_;
  std::vector<Row> rows_;
};

struct ColumnStats {
  std::string column;
  int64_t distinct_count = 0;
  int64_t null_count = 0;
  double avg_text_length = 0.0;
};

}  // namespace relm
