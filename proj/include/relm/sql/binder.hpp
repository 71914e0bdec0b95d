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

#include <memory>
#include <string>
#include <vector>

#include "relm/catalog/catalog.hpp"
#include "relm/sql/ast.hpp"

namespace relm::sql {

struct BoundTable {
  std::string name;     // catalog name
  std::string binding;  // alias when given, else the table name
  std::shared_ptr<const Table> table;
};

struct BoundQuery {
  QueryAst ast;  // all column references resolved in place
  std::vector<BoundTable> tables;
  std::vector<std::string> output_names;  // one per select item
  bool has_rag = false;
};

/// Defaults used by contract inference; all overridable through the engine
/// config and the explicit RETURNING clause.
struct ContractDefaults {
  std::string choice_complement = "No";
  int64_t aggregate_lo = 0;
  int64_t aggregate_hi = 5;
};

struct ContractContext {
  LlmSite site = LlmSite::SelectProjection;
  std::string expected_literal;  // WherePredicate only
};

/// Derives the output contract from syntactic context: an equality literal
/// yields a closed choice set, AVG yields an integer range, projections stay
/// free text. RETURNING overrides; a RETURNING that contradicts the context
/// raises ContractConflict.
OutputContract infer_contract(const LlmInvocation &invocation,
                              const ContractContext &context,
                              const ContractDefaults &defaults);

/// Resolves names against the catalog, checks placeholder arity, assigns
/// sites and contracts to every invocation.
BoundQuery bind(const QueryAst &ast, const Catalog &catalog,
                const ContractDefaults &defaults = {});

}  // namespace relm::sql
