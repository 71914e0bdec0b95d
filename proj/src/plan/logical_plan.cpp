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

#include "relm/plan/logical_plan.hpp"

#include <cmath>
#include <sstream>

namespace relm::plan {

const char *op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::Scan: return "Scan";
    case OpKind::Filter: return "Filter";
    case OpKind::HashJoin: return "Hash Join";
    case OpKind::LlmFilter: return "Filter";
    case OpKind::HashGroupBy: return "Hash Group By";
    case OpKind::LlmAggregateMap: return "LlmAggregateMap";
    case OpKind::Aggregate: return "Aggregate";
    case OpKind::SimilarityTopK: return "SimilarityTopK";
    case OpKind::Projection: return "Projection";
  }
  return "?";
}

std::unique_ptr<PlanNode> PlanNode::clone() const {
  auto copy = std::make_unique<PlanNode>();
  *copy = PlanNode{};
  copy->kind = kind;
  copy->table_index = table_index;
  copy->table_name = table_name;
  copy->conjuncts = conjuncts;
  copy->probe_key = probe_key;
  copy->build_key = build_key;
  copy->llm = llm;
  copy->expected = expected;
  copy->score_slot = score_slot;
  copy->key_slots = key_slots;
  copy->key_displays = key_displays;
  copy->group_slot = group_slot;
  copy->agg_items = agg_items;
  copy->query_slot = query_slot;
  copy->query_display = query_display;
  copy->k = k;
  copy->context_slot = context_slot;
  copy->index_ref = index_ref;
  copy->items = items;
  copy->est_rows = est_rows;
  copy->est_llm_calls = est_llm_calls;
  copy->dedup = dedup;
  copy->est_distinct_prompts = est_distinct_prompts;
  copy->reorder = reorder;
  copy->reorder_slot = reorder_slot;
  copy->reorder_table = reorder_table;
  copy->reorder_column = reorder_column;
  copy->reorder_display = reorder_display;
  copy->op_id = op_id;
  for (const auto &child : children) {
    copy->children.push_back(child->clone());
  }
  return copy;
}

bool PlanNode::has_llm_work() const {
  switch (kind) {
    case OpKind::LlmFilter:
    case OpKind::LlmAggregateMap:
      return true;
    case OpKind::Filter:
      for (const auto &c : conjuncts) {
        if (c.is_llm()) return true;
      }
      return false;
    case OpKind::Projection:
      for (const auto &item : items) {
        if (item.is_llm) return true;
      }
      return false;
    default:
      return false;
  }
}

LogicalPlan LogicalPlan::clone() const {
  LogicalPlan copy;
  copy.root = root ? root->clone() : nullptr;
  copy.table_names = table_names;
  copy.table_bindings = table_bindings;
  copy.table_offsets = table_offsets;
  copy.base_width = base_width;
  copy.total_width = total_width;
  copy.output_names = output_names;
  copy.output_types = output_types;
  copy.slot_sources = slot_sources;
  return copy;
}

namespace {

void renumber_node(PlanNode &node, int &next) {
  node.op_id = next++;
  for (auto &child : node.children) renumber_node(*child, next);
}

std::string node_params(const PlanNode &node) {
  switch (node.kind) {
    case OpKind::Scan:
      return node.table_name;
    case OpKind::Filter: {
      std::string out;
      for (size_t i = 0; i < node.conjuncts.size(); ++i) {
        if (i) out += " AND ";
        out += node.conjuncts[i].display;
      }
      return out;
    }
    case OpKind::LlmFilter:
      return "llm_filter = \"" + node.expected + "\"";
    case OpKind::HashJoin:
      return node.probe_key.display + " = " + node.build_key.display;
    case OpKind::HashGroupBy: {
      std::string out;
      for (size_t i = 0; i < node.key_displays.size(); ++i) {
        if (i) out += ", ";
        out += node.key_displays[i];
      }
      return out;
    }
    case OpKind::LlmAggregateMap:
      return "score " + std::to_string(node.llm->contract.lo) + ".." +
             std::to_string(node.llm->contract.hi);
    case OpKind::Aggregate: {
      std::string out;
      for (const auto &item : node.agg_items) {
        if (!out.empty()) out += ", ";
        out += item.display;
      }
      return out;
    }
    case OpKind::SimilarityTopK:
      return node.index_ref + ", k=" + std::to_string(node.k);
    case OpKind::Projection: {
      bool any_llm = false;
      for (const auto &item : node.items) any_llm |= item.is_llm;
      if (any_llm) return "llm_complete";
      std::string out;
      for (size_t i = 0; i < node.items.size(); ++i) {
        if (i) out += ", ";
        out += node.items[i].display;
      }
      return out;
    }
  }
  return "";
}

bool elide_in_explain(const PlanNode &node, const LogicalPlan &plan) {
  // An identity projection over a single table adds no information.
  if (node.kind != OpKind::Projection) return false;
  if (node.children.size() != 1 || node.children[0]->kind != OpKind::Scan) {
    return false;
  }
  if (plan.table_names.size() != 1 || node.items.size() != plan.base_width) {
    return false;
  }
  for (size_t i = 0; i < node.items.size(); ++i) {
    if (node.items[i].is_llm || node.items[i].source_slot != i) return false;
  }
  return true;
}

void explain_node(const PlanNode &node, const LogicalPlan &plan, int depth,
                  std::ostringstream &out) {
  if (elide_in_explain(node, plan)) {
    explain_node(*node.children[0], plan, depth, out);
    return;
  }
  for (int i = 0; i < depth; ++i) out << "  ";
  out << op_kind_name(node.kind);
  if (node.kind == OpKind::Scan) {
    out << " " << node.table_name;
  } else {
    std::string params = node_params(node);
    if (!params.empty()) out << " (" << params << ")";
  }
  out << "  [rows=" << static_cast<long long>(std::llround(node.est_rows))
      << ", llm_calls="
      << static_cast<long long>(std::llround(node.est_llm_calls));
  if (node.dedup) {
    out << ", dedup="
        << static_cast<long long>(std::llround(node.est_distinct_prompts));
  }
  if (node.reorder) out << ", reorder=" << node.reorder_display;
  out << "]\n";
  for (const auto &child : node.children) {
    explain_node(*child, plan, depth + 1, out);
  }
}

}  // namespace

void LogicalPlan::renumber() {
  int next = 0;
  if (root) renumber_node(*root, next);
}

std::string explain(const LogicalPlan &plan) {
  std::ostringstream out;
  if (plan.root) explain_node(*plan.root, plan, 0, out);
  return out.str();
}

}  // namespace relm::plan
