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

#include <stdexcept>
#include <string>

namespace relm {

enum class ErrorCode {
  FileNotFound,
  SchemaMismatch,
  TypeCoercion,
  UnknownTable,
  UnknownColumn,
  AmbiguousColumn,
  PlaceholderArityMismatch,
  Syntax,
  UnsupportedFeature,
  ContractConflict,
  Plan,
  ArityMismatch,
  UnsupportedDialect,
  Validation,
  Transport,
  Timeout,
  BackendRefused,
  DimensionMismatch,
  EmptyTable,
  QueryAborted,
  BackendDown,
  Config,
  TypeError,
  Internal,
};

const char *error_code_name(ErrorCode code);

enum class ValidationFailure {
  NotInChoiceSet,
  NotAnInteger,
  OutOfRange,
  SchemaViolation,
};

const char *validation_failure_name(ValidationFailure reason);

/// Engine-wide error type. Parse errors carry a 1-based (line, column);
/// validation errors carry the failure reason.
class EngineError : public std::runtime_error {
 public:
  EngineError(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  EngineError(ErrorCode code, std::string message, int line, int column)
      : std::runtime_error(std::move(message)),
        code_(code),
        line_(line),
        column_(column) {}

  EngineError(ValidationFailure reason, std::string message)
      : std::runtime_error(std::move(message)),
        code_(ErrorCode::Validation),
        validation_reason_(reason) {}

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }
  ValidationFailure validation_reason() const { return validation_reason_; }

 private:
  ErrorCode code_;
  int line_ = 0;
  int column_ = 0;
  ValidationFailure validation_reason_ = ValidationFailure::NotInChoiceSet;
};

}  // namespace relm
