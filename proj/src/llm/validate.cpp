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

#include "relm/llm/validate.hpp"

#include <algorithm>
#include <charconv>

#include <nlohmann/json.hpp>

#include "relm/common/error.hpp"

namespace relm {

std::string trim_whitespace(const std::string &text) {
  size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

namespace {

[[noreturn]] void reject(ValidationFailure reason, const std::string &detail) {
  throw EngineError(reason, std::string(validation_failure_name(reason)) +
                                ": " + detail);
}

bool field_matches(const nlohmann::json &value, ColumnType type) {
  switch (type) {
    case ColumnType::Text: return value.is_string();
    case ColumnType::Int64: return value.is_number_integer();
    case ColumnType::Float64: return value.is_number();
    case ColumnType::Bool: return value.is_boolean();
    case ColumnType::Vector: return false;
  }
  return false;
}

}  // namespace

TypedValue validate_output(const OutputContract &contract,
                           const std::string &raw) {
  std::string trimmed = trim_whitespace(raw);
  switch (contract.kind) {
    case ContractKind::FreeText: {
      TypedValue v;
      v.kind = TypedValueKind::Text;
      v.text = raw;
      return v;
    }
    case ContractKind::Choice: {
      auto it = std::find(contract.choices.begin(), contract.choices.end(),
                          trimmed);
      if (it == contract.choices.end()) {
        reject(ValidationFailure::NotInChoiceSet, "'" + trimmed + "'");
      }
      TypedValue v;
      v.kind = TypedValueKind::Label;
      v.text = trimmed;
      return v;
    }
    case ContractKind::IntRange: {
      int64_t parsed = 0;
      const char *begin = trimmed.data();
      const char *end = begin + trimmed.size();
      auto res = std::from_chars(begin, end, parsed);
      if (trimmed.empty() || res.ec != std::errc() || res.ptr != end) {
        reject(ValidationFailure::NotAnInteger, "'" + trimmed + "'");
      }
      if (parsed < contract.lo || parsed > contract.hi) {
        reject(ValidationFailure::OutOfRange,
               trimmed + " outside [" + std::to_string(contract.lo) + ", " +
                   std::to_string(contract.hi) + "]");
      }
      TypedValue v;
      v.kind = TypedValueKind::Score;
      v.score = parsed;
      return v;
    }
    case ContractKind::SchemaText: {
      nlohmann::json doc = nlohmann::json::parse(trimmed, nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) {
        reject(ValidationFailure::SchemaViolation, "not a JSON object");
      }
      for (const auto &field : contract.fields) {
        if (!doc.contains(field.name)) {
          reject(ValidationFailure::SchemaViolation,
                 "missing field '" + field.name + "'");
        }
        if (!field_matches(doc[field.name], field.type)) {
          reject(ValidationFailure::SchemaViolation,
                 "field '" + field.name + "' is not " +
                     column_type_name(field.type));
        }
      }
      if (doc.size() != contract.fields.size()) {
        reject(ValidationFailure::SchemaViolation, "unexpected extra fields");
      }
      TypedValue v;
      v.kind = TypedValueKind::Record;
      v.text = doc.dump();
      return v;
    }
  }
  TypedValue v;
  v.text = raw;
  return v;
}

}  // namespace relm
