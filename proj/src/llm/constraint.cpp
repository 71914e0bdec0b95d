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

#include "relm/llm/constraint.hpp"

#include "relm/common/error.hpp"

namespace relm {

namespace {

// Characters with meaning inside a regex alternation.
std::string regex_escape(const std::string &text) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (special.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

constexpr int64_t kEnumerationLimit = 512;

nlohmann::json schema_for_field(ColumnType type) {
  switch (type) {
    case ColumnType::Text: return {{"type", "string"}};
    case ColumnType::Int64: return {{"type", "integer"}};
    case ColumnType::Float64: return {{"type", "number"}};
    case ColumnType::Bool: return {{"type", "boolean"}};
    case ColumnType::Vector: break;
  }
  throw EngineError(ErrorCode::UnsupportedDialect,
                    "vector fields are not expressible as an output schema");
}

}  // namespace

std::string choice_regex(const std::vector<std::string> &choices) {
  std::string out = "^(";
  for (size_t i = 0; i < choices.size(); ++i) {
    if (i) out += "|";
    out += regex_escape(choices[i]);
  }
  out += ")$";
  return out;
}

std::string int_range_regex(int64_t lo, int64_t hi) {
  if (lo >= 0 && hi <= 9) {
    return "^[" + std::to_string(lo) + "-" + std::to_string(hi) + "]$";
  }
  if (hi - lo + 1 <= kEnumerationLimit) {
    std::string out = "^(";
    for (int64_t v = lo; v <= hi; ++v) {
      if (v != lo) out += "|";
      out += std::to_string(v);
    }
    out += ")$";
    return out;
  }
  // Loose digit-count bound for very wide ranges; exact enforcement stays
  // with validate_output.
  size_t digits = std::to_string(std::max(std::abs(lo), std::abs(hi))).size();
  std::string out = "^";
  if (lo < 0) out += "-?";
  out += "[0-9]{1," + std::to_string(digits) + "}$";
  return out;
}

nlohmann::json contract_json_schema(const OutputContract &contract) {
  switch (contract.kind) {
    case ContractKind::FreeText:
      return {{"type", "string"}};
    case ContractKind::Choice:
      return {{"type", "string"}, {"enum", contract.choices}};
    case ContractKind::IntRange:
      return {{"type", "integer"},
              {"minimum", contract.lo},
              {"maximum", contract.hi}};
    case ContractKind::SchemaText: {
      nlohmann::json properties = nlohmann::json::object();
      nlohmann::json required = nlohmann::json::array();
      for (const auto &field : contract.fields) {
        properties[field.name] = schema_for_field(field.type);
        required.push_back(field.name);
      }
      return {{"type", "object"},
              {"properties", properties},
              {"required", required},
              {"additionalProperties", false}};
    }
  }
  return {{"type", "string"}};
}

nlohmann::json constraint_payload(const OutputContract &contract,
                                  ConstraintDialect dialect) {
  if (contract.kind == ContractKind::FreeText) {
    return nlohmann::json::object();
  }
  switch (dialect) {
    case ConstraintDialect::None:
      throw EngineError(ErrorCode::UnsupportedDialect,
                        "backend has no constrained-decoding dialect; "
                        "falling back to client-side validation");
    case ConstraintDialect::GuidedChoiceRegex: {
      // vLLM-style extension fields; exact names pinned in docs/backends.md.
      switch (contract.kind) {
        case ContractKind::Choice:
          return {{"guided_choice", contract.choices}};
        case ContractKind::IntRange:
          return {{"guided_regex", int_range_regex(contract.lo, contract.hi)}};
        case ContractKind::SchemaText:
          return {{"guided_json", contract_json_schema(contract)}};
        case ContractKind::FreeText:
          break;
      }
      return nlohmann::json::object();
    }
    case ConstraintDialect::JsonSchemaResponseFormat: {
      return {{"response_format",
               {{"type", "json_schema"},
                {"json_schema",
                 {{"name", "query_output"},
                  {"strict", true},
                  {"schema", contract_json_schema(contract)}}}}}};
    }
  }
  return nlohmann::json::object();
}

}  // namespace relm
