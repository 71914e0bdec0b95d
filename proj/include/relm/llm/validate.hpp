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

#include <string>

#include "relm/common/value.hpp"
#include "relm/llm/contract.hpp"

namespace relm {

enum class TypedValueKind { Text, Label, Score, Record };

/// A validated model output. The payload always satisfies the originating
/// contract exactly (membership, range, or schema).
struct TypedValue {
  TypedValueKind kind = TypedValueKind::Text;
  std::string text;       // Text, Label, Record (records keep canonical JSON)
  int64_t score = 0;      // Score

  Value to_value() const {
    return kind == TypedValueKind::Score ? Value(score) : Value(text);
  }
};

/// Exact-match validation after trimming leading/trailing whitespace only —
/// no substring extraction. Throws EngineError(ValidationError) with reason
/// NotInChoiceSet / NotAnInteger / OutOfRange / SchemaViolation.
TypedValue validate_output(const OutputContract &contract,
                           const std::string &raw);

std::string trim_whitespace(const std::string &text);

}  // namespace relm
