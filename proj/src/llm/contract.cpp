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

#include "relm/llm/contract.hpp"

#include <algorithm>

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"

namespace relm {

OutputContract OutputContract::choice(std::vector<std::string> members) {
  std::vector<std::string> unique;
  for (auto &m : members) {
    if (std::find(unique.begin(), unique.end(), m) == unique.end()) {
      unique.push_back(std::move(m));
    }
  }
  if (unique.empty()) {
    throw EngineError(ErrorCode::ContractConflict, "empty choice set");
  }
  OutputContract c;
  c.kind = ContractKind::Choice;
  c.choices = std::move(unique);
  return c;
}

OutputContract OutputContract::int_range(int64_t lo, int64_t hi) {
  if (lo > hi) {
    throw EngineError(ErrorCode::ContractConflict,
                      "integer range with lo > hi: " + std::to_string(lo) +
                          ".." + std::to_string(hi));
  }
  OutputContract c;
  c.kind = ContractKind::IntRange;
  c.lo = lo;
  c.hi = hi;
  return c;
}

OutputContract OutputContract::schema_text(std::vector<SchemaField> fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    for (size_t j = i + 1; j < fields.size(); ++j) {
      if (fields[i].name == fields[j].name) {
        throw EngineError(ErrorCode::ContractConflict,
                          "duplicate schema field: " + fields[i].name);
      }
    }
  }
  OutputContract c;
  c.kind = ContractKind::SchemaText;
  c.fields = std::move(fields);
  return c;
}

int64_t OutputContract::expected_decode_tokens(int64_t free_text_tokens) const {
  switch (kind) {
    case ContractKind::Choice:
    case ContractKind::IntRange:
      return 1;
    case ContractKind::FreeText:
    case ContractKind::SchemaText:
      return free_text_tokens;
  }
  return free_text_tokens;
}

uint64_t OutputContract::fingerprint() const {
  uint64_t h = splitmix64(static_cast<uint64_t>(kind) + 0x636f6e74ULL);
  for (const auto &member : choices) h = hash_combine(h, fnv1a64(member));
  h = hash_combine(h, static_cast<uint64_t>(lo));
  h = hash_combine(h, static_cast<uint64_t>(hi));
  for (const auto &field : fields) {
    h = hash_combine(h, fnv1a64(field.name));
    h = hash_combine(h, static_cast<uint64_t>(field.type));
  }
  return h;
}

std::string OutputContract::describe() const {
  switch (kind) {
    case ContractKind::FreeText:
      return "free text";
    case ContractKind::Choice: {
      std::string out = "one of: ";
      for (size_t i = 0; i < choices.size(); ++i) {
        if (i) out += ", ";
        out += choices[i];
      }
      return out;
    }
    case ContractKind::IntRange:
      return "an integer between " + std::to_string(lo) + " and " +
             std::to_string(hi);
    case ContractKind::SchemaText: {
      std::string out = "a JSON object with fields: ";
      for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ", ";
        out += fields[i].name;
        out += ":";
        out += column_type_name(fields[i].type);
      }
      return out;
    }
  }
  return "free text";
}

}  // namespace relm
