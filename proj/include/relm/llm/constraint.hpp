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

#include <nlohmann/json.hpp>

#include "relm/llm/backend.hpp"
#include "relm/llm/contract.hpp"

namespace relm {

/// Compiles a contract into request fields for the given dialect. FreeText
/// compiles to an empty object for every dialect. A constrained contract
/// under ConstraintDialect::None raises UnsupportedDialect; callers fall back
/// to validate-and-retry and flag it in metrics.
nlohmann::json constraint_payload(const OutputContract &contract,
                                  ConstraintDialect dialect);

/// Anchored regex for a choice set, e.g. `^(Yes|No)$`.
std::string choice_regex(const std::vector<std::string> &choices);

/// Anchored regex for an integer range: a digit class for single-digit
/// non-negative ranges (`^[0-5]$`), an explicit alternation for small ranges,
/// and a digit-count bound otherwise (client-side validation stays exact).
std::string int_range_regex(int64_t lo, int64_t hi);

/// JSON schema node for a contract (enum / bounded integer / object).
nlohmann::json contract_json_schema(const OutputContract &contract);

}  // namespace relm
