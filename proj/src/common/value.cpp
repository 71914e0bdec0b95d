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

#include "relm/common/value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"

namespace relm {

const char *column_type_name(ColumnType type) {
  switch (type) {
    case ColumnType::Text: return "text";
    case ColumnType::Int64: return "int64";
    case ColumnType::Float64: return "float64";
    case ColumnType::Bool: return "bool";
    case ColumnType::Vector: return "vector";
  }
  return "text";
}

ColumnType column_type_from_name(const std::string &name) {
  if (name == "text") return ColumnType::Text;
  if (name == "int64") return ColumnType::Int64;
  if (name == "float64") return ColumnType::Float64;
  if (name == "bool") return ColumnType::Bool;
  if (name == "vector") return ColumnType::Vector;
  throw EngineError(ErrorCode::Config, "unknown column type: " + name);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Value::to_text() const {
  if (is_null()) return "";
  if (is_text()) return as_text();
  if (is_int()) return std::to_string(as_int());
  if (is_float()) return format_double(as_float());
  if (is_bool()) return as_bool() ? "true" : "false";
  std::string out = "[";
  const auto &vec = as_vector();
  for (size_t i = 0; i < vec.size(); ++i) {
    if (i) out += ' ';
    out += format_double(vec[i]);
  }
  out += ']';
  return out;
}

uint64_t Value::hash() const {
  if (is_null()) return 0x9ae16a3b2f90404fULL;
  // Tag with the alternative index so 1 (int) and "1" (text) differ.
  uint64_t tag = splitmix64(storage_.index());
  return hash_combine(tag, fnv1a64(to_text()));
}

namespace {

bool parse_int64(const std::string &text, int64_t &out) {
  const char *begin = text.data();
  const char *end = begin + text.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_float64(const std::string &text, double &out) {
  const char *begin = text.data();
  const char *end = begin + text.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_bool(const std::string &text, bool &out) {
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "true") { out = true; return true; }
  if (lower == "false") { out = false; return true; }
  return false;
}

bool parse_vector(const std::string &text, std::vector<float> &out) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') return false;
  out.clear();
  size_t pos = 1;
  const size_t end = text.size() - 1;
  while (pos < end) {
    while (pos < end && text[pos] == ' ') ++pos;
    if (pos >= end) break;
    size_t next = text.find(' ', pos);
    if (next == std::string::npos || next > end) next = end;
    double d;
    std::string token = text.substr(pos, next - pos);
    if (!parse_float64(token, d)) return false;
    out.push_back(static_cast<float>(d));
    pos = next;
  }
  return true;
}

}  // namespace

Value parse_value(const std::string &text, ColumnType type) {
  if (text.empty()) return Value::null();
  switch (type) {
    case ColumnType::Text:
      return Value(text);
    case ColumnType::Int64: {
      int64_t v;
      if (parse_int64(text, v)) return Value(v);
      break;
    }
    case ColumnType::Float64: {
      double v;
      if (parse_float64(text, v)) return Value(v);
      break;
    }
    case ColumnType::Bool: {
      bool v;
      if (parse_bool(text, v)) return Value(v);
      break;
    }
    case ColumnType::Vector: {
      std::vector<float> v;
      if (parse_vector(text, v)) return Value(std::move(v));
      break;
    }
  }
  throw EngineError(ErrorCode::TypeCoercion,
                    std::string("value '") + text + "' is not a valid " +
                        column_type_name(type));
}

const char *error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::TypeCoercion: return "TypeCoercionError";
    case ErrorCode::UnknownTable: return "UnknownTable";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::AmbiguousColumn: return "AmbiguousColumn";
    case ErrorCode::PlaceholderArityMismatch: return "PlaceholderArityMismatch";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::ContractConflict: return "ContractConflict";
    case ErrorCode::Plan: return "PlanError";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnsupportedDialect: return "UnsupportedDialect";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::Transport: return "TransportError";
    case ErrorCode::Timeout: return "TimeoutError";
    case ErrorCode::BackendRefused: return "BackendRefused";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::QueryAborted: return "QueryAborted";
    case ErrorCode::BackendDown: return "BackendDown";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::Internal: return "InternalError";
  }
  return "InternalError";
}

const char *validation_failure_name(ValidationFailure reason) {
  switch (reason) {
    case ValidationFailure::NotInChoiceSet: return "NotInChoiceSet";
    case ValidationFailure::NotAnInteger: return "NotAnInteger";
    case ValidationFailure::OutOfRange: return "OutOfRange";
    case ValidationFailure::SchemaViolation: return "SchemaViolation";
  }
  return "NotInChoiceSet";
}

}  // namespace relm
