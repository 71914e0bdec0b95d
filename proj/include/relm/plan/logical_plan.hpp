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
#include <utility>
#include <optional>
#include <string>
#include <vector>

#include "relm/common/value.hpp"
#include "relm/llm/contract.hpp"
#include "relm/sql/ast.hpp"

namespace relm::plan {

enum class OpKind {
  Scan,
  Filter,
  HashJoin,
  LlmFilter,
  HashGroupBy,
  LlmAggregateMap,
  Aggregate,
  SimilarityTopK,
  Projection,
};

const char *op_kind_name(OpKind kind);

/// A rendered-call template bound to row slots: the prompt, its argument
/// positions in the wide row, and the machine-checkable output contract.
struct LlmCallSpec {
  std::string template_text;
  std::vector<std::string> placeholders;
  std::vector<size_t> arg_slots;
  // Base-table provenance per arg: (table_index, column_index), or (-1, -1)
  // for computed inputs such as retrieved context.
  std::vector<std::pair<int, int>> arg_sources;
  std::vector<std::string> arg_displays;
  OutputContract contract;
  sql::LlmSite site = sql::LlmSite::SelectProjection;
  uint64_t template_hash = 0;
};

struct Operand {
  bool is_column = false;
  size_t slot = 0;
  int table_index = -1;
  int column_index = -1;
  Value literal;
  std::string display;
};

struct Conjunct {
  enum class Kind { Comparison, BoolLiteral, Llm };
  Kind kind = Kind::Comparison;
  Operand lhs, rhs;
  sql::CompareOp op = sql::CompareOp::Eq;
  bool bool_value = true;
  std::optional<LlmCallSpec> llm;
  std::string expected;
  std::string display;

  bool is_llm() const { return kind == Kind::Llm; }
};

struct ProjItem {
  bool is_llm = false;
  size_t source_slot = 0;              // plain column
  std::optional<LlmCallSpec> llm;      // LLM item
  size_t out_slot = 0;                 // wide-row slot receiving the output
  std::string name;
  std::string display;
};

struct AggItem {
  enum class Kind { GroupKey, AvgLlm, AvgColumn };
  Kind kind = Kind::GroupKey;
  size_t slot = 0;  // key slot / score slot / numeric column slot
  std::string name;
  std::string display;
};

struct PlanNode {
  OpKind kind = OpKind::Scan;
  std::vector<std::unique_ptr<PlanNode>> children;

  // Scan
  int table_index = -1;
  std::string table_name;

  // Filter (ordered conjuncts; may contain inline LLM predicates in the
  // canonical plan)
  std::vector<Conjunct> conjuncts;

  // HashJoin: children[0] = probe, children[1] = build
  Operand probe_key, build_key;

  // LlmFilter / LlmAggregateMap
  std::optional<LlmCallSpec> llm;
  std::string expected;     // LlmFilter
  size_t score_slot = 0;    // LlmAggregateMap output

  // HashGroupBy
  std::vector<size_t> key_slots;
  std::vector<std::string> key_displays;
  size_t group_slot = 0;  // computed slot holding the group ordinal

  // Aggregate
  std::vector<AggItem> agg_items;

  // SimilarityTopK
  size_t query_slot = 0;
  std::string query_display;
  int64_t k = 0;
  size_t context_slot = 0;
  std::string index_ref;  // "table.column"

  // Projection
  std::vector<ProjItem> items;

  // Estimates and rewrite annotations.
  double est_rows = 0.0;
  double est_llm_calls = 0.0;
  bool dedup = false;
  double est_distinct_prompts = 0.0;
  bool reorder = false;
  size_t reorder_slot = 0;
  int reorder_table = -1, reorder_column = -1;
  std::string reorder_display;

  int op_id = 0;

  std::unique_ptr<PlanNode> clone() const;
  bool has_llm_work() const;
};

/// Wide-row layout: the concatenation of all bound tables' columns followed
/// by computed slots (retrieved context, group ordinals, scores, projected
/// LLM outputs).
struct LogicalPlan {
  std::unique_ptr<PlanNode> root;
  std::vector<std::string> table_names;     // binding order
  std::vector<std::string> table_bindings;  // alias or name, for display
  std::vector<size_t> table_offsets;
  size_t base_width = 0;
  size_t total_width = 0;
  std::vector<std::string> output_names;
  std::vector<ColumnType> output_types;
  // Base-table provenance per slot; computed slots are (-1, -1).
  std::vector<std::pair<int, int>> slot_sources;

  LogicalPlan clone() const;

  /// Renumbers op_ids in pre-order; run after any rewrite.
  void renumber();
};

/// Deterministic indented tree: one operator per line with key parameters,
/// estimated rows, and estimated LLM calls. Identity projections over a
/// bare scan are elided. Byte-stable across runs.
std::string explain(const LogicalPlan &plan);

}  // namespace relm::plan
