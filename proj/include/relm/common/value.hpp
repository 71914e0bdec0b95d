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
#include <string>
#include <variant>
#include <vector>

namespace relm {

enum class ColumnType { Text, Int64, Float64, Bool, Vector };

const char *column_type_name(ColumnType type);
ColumnType column_type_from_name(const std::string &name);

/// A single cell. monostate is SQL NULL.
class Value {
 public:
  using Storage = std::variant<std::monostate, std::string, int64_t, double,
                               bool, std::vector<float>>;

  Value() = default;
  explicit Value(std::string v) : storage_(std::move(v)) {}
  explicit Value(const char *v) : storage_(std::string(v)) {}
  explicit Value(int64_t v) : storage_(v) {}
  explicit Value(double v) : storage_(v) {}
  explicit Value(bool v) : storage_(v) {}
  explicit Value(std::vector<float> v) : storage_(std::move(v)) {}

  static Value null() { return Value(); }

  bool is_null() const {
    return std::holds_alternative<std::monostate>(storage_);
  }
  bool is_text() const { return std::holds_alternative<std::string>(storage_); }
  bool is_int() const { return std::holds_alternative<int64_t>(storage_); }
  bool is_float() const { return std::holds_alternative<double>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_vector() const {
    return std::holds_alternative<std::vector<float>>(storage_);
  }

  const std::string &as_text() const { return std::get<std::string>(storage_); }
  int64_t as_int() const { return std::get<int64_t>(storage_); }
  double as_float() const { return std::get<double>(storage_); }
  bool as_bool() const { return std::get<bool>(storage_); }
  const std::vector<float> &as_vector() const {
    return std::get<std::vector<float>>(storage_);
  }

  /// Numeric view: int64 and float64 both compare as double.
  double numeric() const {
    return is_int() ? static_cast<double>(as_int()) : as_float();
  }
  bool is_numeric() const { return is_int() || is_float(); }

  /// Text form used for prompts, CSV cells and hashing. NULL renders as ""
  /// here; prompt rendering substitutes its own `<NULL>` marker.
  std::string to_text() const;

  bool operator==(const Value &other) const { return storage_ == other.storage_; }

  uint64_t hash() const;

 private:
  Storage storage_;
};

/// Parse `text` as `type`. Empty text is NULL for every type.
/// Throws EngineError(TypeCoercion) when the text does not conform.
Value parse_value(const std::string &text, ColumnType type);

/// Lossless text form for doubles (shortest round-trip representation).
std::string format_double(double v);

}  // namespace relm
