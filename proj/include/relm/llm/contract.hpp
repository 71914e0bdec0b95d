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
#include <vector>

#include "relm/common/value.hpp"

namespace relm {

enum class ContractKind { FreeText, Choice, IntRange, SchemaText };

struct SchemaField {
  std::string name;
  ColumnType type;

  bool operator==(const SchemaField &) const = default;
};

/// The machine-checkable set of strings a model call may return. Choice
/// keeps construction order (the expected literal first) so compiled
/// regexes are stable; members are unique.
struct OutputContract {
  ContractKind kind = ContractKind::FreeText;
  std::vector<std::string> choices;   // Choice
  int64_t lo = 0, hi = 0;             // IntRange
  std::vector<SchemaField> fields;    // SchemaText

  static OutputContract free_text() { return {}; }
  static OutputContract choice(std::vector<std::string> members);
  static OutputContract int_range(int64_t lo, int64_t hi);
  static OutputContract schema_text(std::vector<SchemaField> fields);

  bool is_constrained() const { return kind != ContractKind::FreeText; }

  /// Expected decode length for the cost model: one token for Choice and
  /// IntRange, `free_text_tokens` otherwise.
  int64_t expected_decode_tokens(int64_t free_text_tokens) const;

  /// Stable one-line description, used in EXPLAIN and retry prompts.
  std::string describe() const;

  /// Deterministic hash over kind and parameters; part of dedup keys so
  /// that equal prompts under different contracts never share a cache slot.
  uint64_t fingerprint() const;

  bool operator==(const OutputContract &) const = default;
};

}  // namespace relm
