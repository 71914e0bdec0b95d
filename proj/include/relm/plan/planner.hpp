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

#include "relm/catalog/catalog.hpp"
#include "relm/plan/logical_plan.hpp"
#include "relm/sql/binder.hpp"

namespace relm::plan {

/// Cost coefficients and planner defaults; all configurable. The linear
/// prefill/decode model with a prefix-run discount is this engine's
/// formalization of LLM-call cost.
struct PlannerConfig {
  double c_prefill = 1.0;
  double c_decode = 2.0;
  double epsilon = 1e-6;  // weight of relational rows processed
  int64_t free_text_decode_tokens = 256;
  int64_t default_k = 3;
  double llm_selectivity = 0.5;       // unknown-predicate default
  double unknown_selectivity = 0.5;
  // R1 moves purely relational work; it must buy a material improvement,
  // not an epsilon, before restructuring an LLM-dominated plan.
  double r1_min_relative_gain = 1e-4;
  std::string rag_index;  // "table.column" backing SIMILARITY_SEARCH
};

struct CostEstimate {
  int64_t llm_calls = 0;
  int64_t prefill_tokens = 0;
  int64_t decode_tokens = 0;
  double relational_cost = 0.0;
  double total = 0.0;
};

/// Exact desk-scale statistics resolved through the catalog, addressed by
/// bound-table index.
class StatsProvider {
 public:
  StatsProvider(const Catalog &catalog,
                const std::vector<sql::BoundTable> &tables)
      : catalog_(&catalog), tables_(&tables) {}

  ColumnStats column(int table_index, int column_index) const;
  ColumnStats by_name(const std::string &table, const std::string &column) const;
  int64_t table_rows(int table_index) const;

 private:
  const Catalog *catalog_;
  const std::vector<sql::BoundTable> *tables_;
};

/// Canonical, un-optimized plan: Scans, HashJoin (probe = larger side),
/// SimilarityTopK, Filter with all conjuncts in source order (LLM predicates
/// inline), grouping/aggregation, projection.
LogicalPlan build_logical(const sql::BoundQuery &bound,
                          const PlannerConfig &config);

/// Applies, to fixpoint and in order: R1 single-side predicate pushdown
/// below joins, R2 conjunct ordering (cheap before LLM, extracting LlmFilter
/// nodes), R3 filter-below-top-k, R4 dedup annotation, R5 prefix-share
/// reorder annotation. Every rule is guarded: it must not increase
/// CostEstimate.total. Row and call estimates are (re)annotated.
LogicalPlan optimize(const LogicalPlan &plan, const StatsProvider &stats,
                     const PlannerConfig &config);

/// Annotates est_rows / est_llm_calls bottom-up (also run by optimize).
void annotate_estimates(LogicalPlan &plan, const StatsProvider &stats,
                        const PlannerConfig &config);

CostEstimate estimate_cost(const LogicalPlan &plan, const StatsProvider &stats,
                           const PlannerConfig &config);

}  // namespace relm::plan
