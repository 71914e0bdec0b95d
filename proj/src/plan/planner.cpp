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

#include "relm/plan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"
#include "relm/common/tokens.hpp"
#include "relm/llm/prompt.hpp"

namespace relm::plan {

ColumnStats StatsProvider::column(int table_index, int column_index) const {
  const auto &bound = (*tables_)[static_cast<size_t>(table_index)];
  const auto &name = bound.table->schema().column(
      static_cast<size_t>(column_index)).name;
  return catalog_->column_stats(bound.name, name);
}

ColumnStats StatsProvider::by_name(const std::string &table,
                                   const std::string &column) const {
  return catalog_->column_stats(table, column);
}

int64_t StatsProvider::table_rows(int table_index) const {
  return static_cast<int64_t>(
      (*tables_)[static_cast<size_t>(table_index)].table->row_count());
}

namespace {

// ---------------------------------------------------------------------------
// build_logical
// ---------------------------------------------------------------------------

struct LayoutBuilder {
  const sql::BoundQuery &bound;
  LogicalPlan &plan;
  std::vector<std::pair<int, int>> slot_sources;

  size_t slot_of(const sql::ColumnRef &ref) const {
    return plan.table_offsets[static_cast<size_t>(ref.table_index)] +
           static_cast<size_t>(ref.column_index);
  }

  size_t new_computed_slot() {
    slot_sources.emplace_back(-1, -1);
    return plan.total_width++;
  }
};

Operand make_column_operand(const LayoutBuilder &layout,
                            const sql::ColumnRef &ref) {
  Operand op;
  op.is_column = true;
  op.slot = layout.slot_of(ref);
  op.table_index = ref.table_index;
  op.column_index = ref.column_index;
  op.display = ref.display();
  return op;
}

Operand make_literal_operand(const Value &v) {
  Operand op;
  op.is_column = false;
  op.literal = v;
  op.display = sql::literal_display(v);
  return op;
}

LlmCallSpec make_call_spec(const LayoutBuilder &layout,
                           const sql::LlmInvocation &inv,
                           std::optional<size_t> context_slot) {
  if (!inv.contract_set) {
    throw EngineError(ErrorCode::Internal,
                      "invocation reached planning without a contract");
  }
  LlmCallSpec spec;
  spec.template_text = inv.template_text;
  spec.placeholders = inv.placeholders;
  spec.contract = inv.contract;
  spec.site = inv.site;
  spec.template_hash = fnv1a64(inv.template_text);
  for (const auto &arg : inv.args) {
    if (arg.kind == sql::LlmArg::Kind::Similarity) {
      spec.arg_slots.push_back(*context_slot);
      spec.arg_sources.emplace_back(-1, -1);
      spec.arg_displays.push_back("SIMILARITY_SEARCH(" +
                                  arg.similarity.query.display() + ")");
    } else {
      spec.arg_slots.push_back(layout.slot_of(arg.column));
      spec.arg_sources.emplace_back(arg.column.table_index,
                                    arg.column.column_index);
      spec.arg_displays.push_back(arg.column.display());
    }
  }
  return spec;
}

Conjunct make_conjunct(const LayoutBuilder &layout, const sql::Predicate &pred,
                       std::optional<size_t> context_slot) {
  Conjunct c;
  switch (pred.kind) {
    case sql::Predicate::Kind::Comparison: {
      c.kind = Conjunct::Kind::Comparison;
      c.lhs = pred.lhs.is_column ? make_column_operand(layout, pred.lhs.column)
                                 : make_literal_operand(pred.lhs.literal);
      c.rhs = pred.rhs.is_column ? make_column_operand(layout, pred.rhs.column)
                                 : make_literal_operand(pred.rhs.literal);
      c.op = pred.op;
      c.display = c.lhs.display + " " + sql::compare_op_text(pred.op) + " " +
                  c.rhs.display;
      return c;
    }
    case sql::Predicate::Kind::BoolLiteral:
      c.kind = Conjunct::Kind::BoolLiteral;
      c.bool_value = pred.bool_value;
      c.display = pred.bool_value ? "TRUE" : "FALSE";
      return c;
    case sql::Predicate::Kind::LlmEquality:
      c.kind = Conjunct::Kind::Llm;
      c.llm = make_call_spec(layout, *pred.llm, context_slot);
      c.expected = pred.expected;
      c.display = "llm = \"" + pred.expected + "\"";
      return c;
  }
  return c;
}

ColumnType output_type_for_contract(const OutputContract &contract) {
  switch (contract.kind) {
    case ContractKind::IntRange: return ColumnType::Int64;
    case ContractKind::FreeText:
    case ContractKind::Choice:
    case ContractKind::SchemaText: return ColumnType::Text;
  }
  return ColumnType::Text;
}

}  // namespace

LogicalPlan build_logical(const sql::BoundQuery &bound,
                          const PlannerConfig &config) {
  LogicalPlan plan;
  for (const auto &t : bound.tables) {
    plan.table_offsets.push_back(plan.base_width);
    plan.table_names.push_back(t.name);
    plan.table_bindings.push_back(t.binding);
    plan.base_width += t.table->schema().arity();
  }
  plan.total_width = plan.base_width;
  plan.output_names = bound.output_names;

  LayoutBuilder layout{bound, plan, {}};
  layout.slot_sources.reserve(plan.base_width);
  for (size_t ti = 0; ti < bound.tables.size(); ++ti) {
    for (size_t ci = 0; ci < bound.tables[ti].table->schema().arity(); ++ci) {
      layout.slot_sources.emplace_back(static_cast<int>(ti),
                                       static_cast<int>(ci));
    }
  }

  // Locate the (at most one) similarity search.
  const sql::SimilaritySearch *similarity = nullptr;
  for (const auto &item : bound.ast.select_items) {
    const sql::LlmInvocation *inv = nullptr;
    if (item.expr.kind == sql::Expr::Kind::Llm) inv = &*item.expr.llm;
    if (item.expr.kind == sql::Expr::Kind::Avg && item.expr.avg->llm) {
      inv = &*item.expr.avg->llm;
    }
    if (!inv) continue;
    for (const auto &arg : inv->args) {
      if (arg.kind == sql::LlmArg::Kind::Similarity) {
        if (similarity) {
          throw EngineError(ErrorCode::UnsupportedFeature,
                            "at most one SIMILARITY_SEARCH per query");
        }
        similarity = &arg.similarity;
      }
    }
  }

  std::optional<size_t> context_slot;
  if (similarity) {
    if (config.rag_index.empty()) {
      throw EngineError(ErrorCode::Plan,
                        "SIMILARITY_SEARCH requires a vector index; ingest "
                        "with --embed and set vector.index in the config");
    }
    context_slot = layout.new_computed_slot();
  }

  // Scan / join pipeline; probe side is the larger input so the reference
  // plans print the fact table first regardless of FROM order.
  auto scan_node = [&](size_t ti) {
    auto node = std::make_unique<PlanNode>();
    node->kind = OpKind::Scan;
    node->table_index = static_cast<int>(ti);
    node->table_name = bound.tables[ti].name;
    return node;
  };

  std::unique_ptr<PlanNode> current = scan_node(0);
  double current_rows =
      static_cast<double>(bound.tables[0].table->row_count());
  std::set<int> current_tables{0};

  for (size_t j = 0; j < bound.ast.joins.size(); ++j) {
    const auto &join = bound.ast.joins[j];
    size_t ti = j + 1;
    double right_rows =
        static_cast<double>(bound.tables[ti].table->row_count());

    const sql::ColumnRef *current_key = nullptr;
    const sql::ColumnRef *new_key = nullptr;
    for (const sql::ColumnRef *key : {&join.left, &join.right}) {
      if (current_tables.count(key->table_index)) {
        current_key = key;
      } else if (key->table_index == static_cast<int>(ti)) {
        new_key = key;
      }
    }
    if (!current_key || !new_key) {
      throw EngineError(ErrorCode::Plan,
                        "join condition must relate the joined table to an "
                        "earlier table");
    }

    auto node = std::make_unique<PlanNode>();
    node->kind = OpKind::HashJoin;
    if (right_rows > current_rows) {
      node->children.push_back(scan_node(ti));
      node->children.push_back(std::move(current));
      node->probe_key = make_column_operand(layout, *new_key);
      node->build_key = make_column_operand(layout, *current_key);
    } else {
      node->children.push_back(std::move(current));
      node->children.push_back(scan_node(ti));
      node->probe_key = make_column_operand(layout, *current_key);
      node->build_key = make_column_operand(layout, *new_key);
    }
    current = std::move(node);
    current_rows = std::max(current_rows, right_rows);
    current_tables.insert(static_cast<int>(ti));
  }

  if (similarity) {
    auto node = std::make_unique<PlanNode>();
    node->kind = OpKind::SimilarityTopK;
    node->query_slot = layout.slot_of(similarity->query);
    node->query_display = similarity->query.display();
    node->k = similarity->k.value_or(config.default_k);
    node->context_slot = *context_slot;
    node->index_ref = config.rag_index;
    node->children.push_back(std::move(current));
    current = std::move(node);
  }

  if (!bound.ast.where_conjuncts.empty()) {
    auto node = std::make_unique<PlanNode>();
    node->kind = OpKind::Filter;
    for (const auto &pred : bound.ast.where_conjuncts) {
      node->conjuncts.push_back(make_conjunct(layout, pred, context_slot));
    }
    node->children.push_back(std::move(current));
    current = std::move(node);
  }

  bool has_aggregate = !bound.ast.group_by.empty();
  for (const auto &item : bound.ast.select_items) {
    if (item.expr.kind == sql::Expr::Kind::Avg) has_aggregate = true;
  }

  if (has_aggregate) {
    // Grouping tags rows with a group ordinal; per-row typed scores feed a
    // native AVG per group.
    auto group = std::make_unique<PlanNode>();
    group->kind = OpKind::HashGroupBy;
    for (const auto &key : bound.ast.group_by) {
      group->key_slots.push_back(layout.slot_of(key));
      group->key_displays.push_back(key.display());
    }
    group->group_slot = layout.new_computed_slot();
    size_t group_slot = group->group_slot;
    group->children.push_back(std::move(current));
    current = std::move(group);

    std::vector<AggItem> agg_items;
    for (size_t i = 0; i < bound.ast.select_items.size(); ++i) {
      const auto &item = bound.ast.select_items[i];
      const std::string &name = bound.output_names[i];
      switch (item.expr.kind) {
        case sql::Expr::Kind::Avg: {
          if (item.expr.avg->llm) {
            auto map = std::make_unique<PlanNode>();
            map->kind = OpKind::LlmAggregateMap;
            map->llm = make_call_spec(layout, *item.expr.avg->llm, context_slot);
            map->score_slot = layout.new_computed_slot();
            AggItem agg;
            agg.kind = AggItem::Kind::AvgLlm;
            agg.slot = map->score_slot;
            agg.name = name;
            agg.display = "avg(" + name + ")";
            agg_items.push_back(agg);
            map->children.push_back(std::move(current));
            current = std::move(map);
          } else {
            AggItem agg;
            agg.kind = AggItem::Kind::AvgColumn;
            agg.slot = layout.slot_of(*item.expr.avg->column);
            agg.name = name;
            agg.display = "avg(" + item.expr.avg->column->display() + ")";
            agg_items.push_back(agg);
          }
          plan.output_types.push_back(ColumnType::Float64);
          break;
        }
        case sql::Expr::Kind::Column: {
          bool is_key = false;
          for (const auto &key : bound.ast.group_by) {
            if (key.table_index == item.expr.column.table_index &&
                key.column_index == item.expr.column.column_index) {
              is_key = true;
            }
          }
          if (!is_key) {
            throw EngineError(ErrorCode::Plan,
                              "select item " + item.expr.column.display() +
                                  " is neither grouped nor aggregated");
          }
          AggItem agg;
          agg.kind = AggItem::Kind::GroupKey;
          agg.slot = layout.slot_of(item.expr.column);
          agg.name = name;
          agg.display = item.expr.column.display();
          agg_items.push_back(agg);
          plan.output_types.push_back(item.expr.column.type);
          break;
        }
        default:
          throw EngineError(ErrorCode::Plan,
                            "select item " + std::to_string(i + 1) +
                                " is neither grouped nor aggregated");
      }
    }

    auto agg = std::make_unique<PlanNode>();
    agg->kind = OpKind::Aggregate;
    agg->group_slot = group_slot;
    agg->agg_items = std::move(agg_items);
    agg->children.push_back(std::move(current));
    current = std::move(agg);
  } else {
    auto proj = std::make_unique<PlanNode>();
    proj->kind = OpKind::Projection;
    for (size_t i = 0; i < bound.ast.select_items.size(); ++i) {
      const auto &item = bound.ast.select_items[i];
      ProjItem out;
      out.name = bound.output_names[i];
      switch (item.expr.kind) {
        case sql::Expr::Kind::Column:
          out.is_llm = false;
          out.source_slot = layout.slot_of(item.expr.column);
          out.display = item.expr.column.display();
          plan.output_types.push_back(item.expr.column.type);
          break;
        case sql::Expr::Kind::Llm:
          out.is_llm = true;
          out.llm = make_call_spec(layout, *item.expr.llm, context_slot);
          out.out_slot = layout.new_computed_slot();
          out.display = "llm";
          plan.output_types.push_back(
              output_type_for_contract(out.llm->contract));
          break;
        default:
          throw EngineError(ErrorCode::Plan,
                            "unsupported select item at position " +
                                std::to_string(i + 1));
      }
      proj->items.push_back(std::move(out));
    }
    proj->children.push_back(std::move(current));
    current = std::move(proj);
  }

  plan.root = std::move(current);
  plan.renumber();
  // slot_sources lives on the side of the plan for stats lookups.
  plan.slot_sources = std::move(layout.slot_sources);
  return plan;
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

namespace {

double conjunct_selectivity(const Conjunct &c, const StatsProvider &stats,
                            const PlannerConfig &config) {
  switch (c.kind) {
    case Conjunct::Kind::BoolLiteral:
      return c.bool_value ? 1.0 : 0.0;
    case Conjunct::Kind::Llm:
      return config.llm_selectivity;
    case Conjunct::Kind::Comparison: {
      const Operand *col = nullptr;
      const Operand *lit = nullptr;
      if (c.lhs.is_column && !c.rhs.is_column) {
        col = &c.lhs;
        lit = &c.rhs;
      } else if (!c.lhs.is_column && c.rhs.is_column) {
        col = &c.rhs;
        lit = &c.lhs;
      }
      if (!col || col->table_index < 0) return config.unknown_selectivity;
      if (c.op == sql::CompareOp::Eq || c.op == sql::CompareOp::Ne) {
        int64_t distinct =
            stats.column(col->table_index, col->column_index).distinct_count;
        double eq = 1.0 / static_cast<double>(std::max<int64_t>(distinct, 1));
        return c.op == sql::CompareOp::Eq ? eq : 1.0 - eq;
      }
      (void)lit;
      return config.unknown_selectivity;
    }
  }
  return config.unknown_selectivity;
}

double llm_op_input_distinct(const LlmCallSpec &spec, double in_rows,
                             const StatsProvider &stats) {
  double product = 1.0;
  for (const auto &[t, c] : spec.arg_sources) {
    if (t < 0) return in_rows;  // computed input: assume all distinct
    int64_t d = stats.column(t, c).distinct_count;
    product *= static_cast<double>(std::max<int64_t>(d, 1));
    if (product >= in_rows) return in_rows;
  }
  return std::min(product, in_rows);
}

void annotate_node(PlanNode &node, const LogicalPlan &plan,
                   const StatsProvider &stats, const PlannerConfig &config) {
  for (auto &child : node.children) {
    annotate_node(*child, plan, stats, config);
  }
  node.est_llm_calls = 0;
  switch (node.kind) {
    case OpKind::Scan:
      node.est_rows = static_cast<double>(stats.table_rows(node.table_index));
      break;
    case OpKind::Filter: {
      double rows = node.children[0]->est_rows;
      for (auto &c : node.conjuncts) {
        if (c.is_llm()) {
          double calls = rows;
          node.est_llm_calls += calls;
        }
        rows *= conjunct_selectivity(c, stats, config);
      }
      node.est_rows = rows;
      break;
    }
    case OpKind::HashJoin: {
      double probe = node.children[0]->est_rows;
      double build = node.children[1]->est_rows;
      int64_t d1 = 1, d2 = 1;
      if (node.probe_key.table_index >= 0) {
        d1 = stats.column(node.probe_key.table_index,
                          node.probe_key.column_index).distinct_count;
      }
      if (node.build_key.table_index >= 0) {
        d2 = stats.column(node.build_key.table_index,
                          node.build_key.column_index).distinct_count;
      }
      double denom = static_cast<double>(std::max({d1, d2, int64_t{1}}));
      node.est_rows = probe * build / denom;
      break;
    }
    case OpKind::LlmFilter: {
      double in = node.children[0]->est_rows;
      double calls = node.dedup ? std::min(node.est_distinct_prompts, in) : in;
      node.est_llm_calls = calls;
      node.est_rows = in * config.llm_selectivity;
      break;
    }
    case OpKind::HashGroupBy: {
      double in = node.children[0]->est_rows;
      node.est_rows = in;
      double groups = in > 0 ? 1.0 : 0.0;
      for (size_t slot : node.key_slots) {
        auto [t, c] = plan.slot_sources[slot];
        if (t >= 0) {
          groups *= static_cast<double>(
              std::max<int64_t>(stats.column(t, c).distinct_count, 1));
        }
      }
      node.est_distinct_prompts = std::min(groups, in);
      break;
    }
    case OpKind::LlmAggregateMap: {
      double in = node.children[0]->est_rows;
      node.est_rows = in;
      node.est_llm_calls =
          node.dedup ? std::min(node.est_distinct_prompts, in) : in;
      break;
    }
    case OpKind::Aggregate: {
      const PlanNode *walk = node.children[0].get();
      while (walk && walk->kind == OpKind::LlmAggregateMap) {
        walk = walk->children[0].get();
      }
      node.est_rows = walk && walk->kind == OpKind::HashGroupBy
                          ? walk->est_distinct_prompts
                          : (node.children[0]->est_rows > 0 ? 1.0 : 0.0);
      break;
    }
    case OpKind::SimilarityTopK:
      node.est_rows = node.children[0]->est_rows;
      break;
    case OpKind::Projection: {
      double in = node.children[0]->est_rows;
      node.est_rows = in;
      double llm_items = 0;
      for (const auto &item : node.items) {
        if (item.is_llm) llm_items += 1;
      }
      if (llm_items > 0) {
        node.est_llm_calls =
            node.dedup ? node.est_distinct_prompts : in * llm_items;
      }
      break;
    }
  }
}

struct OpTokenModel {
  double calls = 0;
  double prefix_groups = 0;   // runs of equal prefix when reordered
  int64_t shared_tokens = 0;  // template text before the first placeholder
  int64_t per_call_tokens = 0;
  int64_t decode_tokens_per_call = 0;
};

int64_t arg_avg_tokens(const LlmCallSpec &spec, size_t arg,
                       const PlanNode &node, const StatsProvider &stats) {
  auto [t, c] = spec.arg_sources[arg];
  if (t >= 0) {
    return estimate_tokens(
        static_cast<size_t>(stats.column(t, c).avg_text_length));
  }
  // Retrieved context: k joined snippets from the corpus column.
  const PlanNode *walk = &node;
  while (walk) {
    if (walk->kind == OpKind::SimilarityTopK) {
      auto dot = walk->index_ref.find('.');
      if (dot != std::string::npos) {
        ColumnStats corpus = stats.by_name(walk->index_ref.substr(0, dot),
                                           walk->index_ref.substr(dot + 1));
        return static_cast<int64_t>(walk->k) *
               estimate_tokens(static_cast<size_t>(corpus.avg_text_length));
      }
    }
    walk = walk->children.empty() ? nullptr : walk->children[0].get();
  }
  return 64;  // computed input with no known provenance
}

OpTokenModel call_token_model(const LlmCallSpec &spec, const PlanNode &node,
                              double calls, const StatsProvider &stats,
                              const PlannerConfig &config) {
  OpTokenModel model;
  model.calls = calls;
  std::string prefix = template_prefix(spec.template_text);
  model.shared_tokens = estimate_tokens(prefix);
  // Literal template text after the prefix; placeholder syntax is not sent.
  size_t remainder_literal = 0;
  for (size_t pos = prefix.size(); pos < spec.template_text.size();) {
    if (spec.template_text[pos] == '{') {
      size_t close = spec.template_text.find('}', pos);
      pos = close == std::string::npos ? spec.template_text.size() : close + 1;
    } else {
      ++remainder_literal;
      ++pos;
    }
  }
  model.per_call_tokens = estimate_tokens(remainder_literal);
  for (size_t a = 0; a < spec.arg_slots.size(); ++a) {
    model.per_call_tokens += arg_avg_tokens(spec, a, node, stats);
  }
  model.decode_tokens_per_call =
      spec.contract.expected_decode_tokens(config.free_text_decode_tokens);
  if (node.reorder && node.reorder_table >= 0) {
    int64_t groups =
        stats.column(node.reorder_table, node.reorder_column).distinct_count;
    model.prefix_groups =
        std::min(static_cast<double>(std::max<int64_t>(groups, 1)), calls);
  } else {
    model.prefix_groups = calls;
  }
  return model;
}

void accumulate_cost(const PlanNode &node, const LogicalPlan &plan,
                     const StatsProvider &stats, const PlannerConfig &config,
                     CostEstimate &cost) {
  for (const auto &child : node.children) {
    accumulate_cost(*child, plan, stats, config, cost);
  }
  // Rows processed: inputs consumed by this operator.
  if (node.kind == OpKind::Scan) {
    cost.relational_cost += node.est_rows;
  } else {
    for (const auto &child : node.children) {
      cost.relational_cost += child->est_rows;
    }
  }

  std::vector<OpTokenModel> models;
  switch (node.kind) {
    case OpKind::Filter: {
      double rows = node.children[0]->est_rows;
      for (const auto &c : node.conjuncts) {
        if (c.is_llm()) {
          models.push_back(
              call_token_model(*c.llm, node, rows, stats, config));
        }
        rows *= conjunct_selectivity(c, stats, config);
      }
      break;
    }
    case OpKind::LlmFilter:
      models.push_back(call_token_model(*node.llm, node, node.est_llm_calls,
                                        stats, config));
      break;
    case OpKind::LlmAggregateMap:
      models.push_back(call_token_model(*node.llm, node, node.est_llm_calls,
                                        stats, config));
      break;
    case OpKind::Projection: {
      double in = node.children[0]->est_rows;
      for (const auto &item : node.items) {
        if (!item.is_llm) continue;
        double calls = node.dedup
                           ? llm_op_input_distinct(*item.llm, in, stats)
                           : in;
        models.push_back(
            call_token_model(*item.llm, node, calls, stats, config));
      }
      break;
    }
    default:
      break;
  }

  for (const auto &model : models) {
    cost.llm_calls += static_cast<int64_t>(std::llround(model.calls));
    double prefill = model.prefix_groups * static_cast<double>(model.shared_tokens) +
                     model.calls * static_cast<double>(model.per_call_tokens);
    cost.prefill_tokens += static_cast<int64_t>(std::llround(prefill));
    cost.decode_tokens += static_cast<int64_t>(
        std::llround(model.calls *
                     static_cast<double>(model.decode_tokens_per_call)));
  }
}

}  // namespace

void annotate_estimates(LogicalPlan &plan, const StatsProvider &stats,
                        const PlannerConfig &config) {
  if (plan.root) annotate_node(*plan.root, plan, stats, config);
}

CostEstimate estimate_cost(const LogicalPlan &plan, const StatsProvider &stats,
                           const PlannerConfig &config) {
  CostEstimate cost;
  if (plan.root) accumulate_cost(*plan.root, plan, stats, config, cost);
  cost.total = config.c_prefill * static_cast<double>(cost.prefill_tokens) +
               config.c_decode * static_cast<double>(cost.decode_tokens) +
               config.epsilon * cost.relational_cost;
  return cost;
}

// ---------------------------------------------------------------------------
// optimize: R1..R5
// ---------------------------------------------------------------------------

namespace {

void collect_tables(const PlanNode &node, std::set<int> &tables) {
  if (node.kind == OpKind::Scan) tables.insert(node.table_index);
  for (const auto &child : node.children) collect_tables(*child, tables);
}

bool conjunct_tables(const Conjunct &c, std::set<int> &tables) {
  if (c.kind == Conjunct::Kind::Llm) return false;
  if (c.kind == Conjunct::Kind::BoolLiteral) return false;
  for (const Operand *op : {&c.lhs, &c.rhs}) {
    if (op->is_column) {
      if (op->table_index < 0) return false;
      tables.insert(op->table_index);
    }
  }
  return true;
}

double plan_cost(LogicalPlan &plan, const StatsProvider &stats,
                 const PlannerConfig &config) {
  annotate_estimates(plan, stats, config);
  return estimate_cost(plan, stats, config).total;
}

// R1: move one single-side non-LLM conjunct from a Filter directly above a
// HashJoin onto that join input. Returns true when a move was applied.
bool apply_r1_once(LogicalPlan &plan) {
  struct Site {
    std::unique_ptr<PlanNode> *filter_slot;
    size_t conjunct_index;
    int side;
  };
  std::optional<Site> found;

  std::function<void(std::unique_ptr<PlanNode> &)> walk =
      [&](std::unique_ptr<PlanNode> &slot) {
        if (found) return;
        PlanNode &node = *slot;
        if (node.kind == OpKind::Filter && !node.children.empty() &&
            node.children[0]->kind == OpKind::HashJoin) {
          PlanNode &join = *node.children[0];
          std::set<int> probe_tables, build_tables;
          collect_tables(*join.children[0], probe_tables);
          collect_tables(*join.children[1], build_tables);
          for (size_t i = 0; i < node.conjuncts.size(); ++i) {
            std::set<int> used;
            if (!conjunct_tables(node.conjuncts[i], used) || used.empty()) {
              continue;
            }
            auto subset = [&](const std::set<int> &side) {
              return std::includes(side.begin(), side.end(), used.begin(),
                                   used.end());
            };
            if (subset(probe_tables)) {
              found = Site{&slot, i, 0};
              return;
            }
            if (subset(build_tables)) {
              found = Site{&slot, i, 1};
              return;
            }
          }
        }
        for (auto &child : node.children) walk(child);
      };
  walk(plan.root);
  if (!found) return false;

  PlanNode &filter = **found->filter_slot;
  PlanNode &join = *filter.children[0];
  Conjunct moved = filter.conjuncts[found->conjunct_index];
  filter.conjuncts.erase(filter.conjuncts.begin() +
                         static_cast<long>(found->conjunct_index));

  auto &side = join.children[static_cast<size_t>(found->side)];
  if (side->kind == OpKind::Filter) {
    side->conjuncts.push_back(moved);
  } else {
    auto pushed = std::make_unique<PlanNode>();
    pushed->kind = OpKind::Filter;
    pushed->conjuncts.push_back(moved);
    pushed->children.push_back(std::move(side));
    side = std::move(pushed);
  }
  if (filter.conjuncts.empty()) {
    *found->filter_slot = std::move(filter.children[0]);
  }
  plan.renumber();
  return true;
}

// R2: order non-LLM conjuncts by ascending selectivity and extract LLM
// predicates into LlmFilter nodes above the relational filter.
bool apply_r2(LogicalPlan &plan, const StatsProvider &stats,
              const PlannerConfig &config) {
  bool changed = false;
  std::function<void(std::unique_ptr<PlanNode> &)> walk =
      [&](std::unique_ptr<PlanNode> &slot) {
        for (auto &child : slot->children) walk(child);
        if (slot->kind != OpKind::Filter) return;
        PlanNode &filter = *slot;

        std::vector<Conjunct> cheap, llm;
        for (auto &c : filter.conjuncts) {
          (c.is_llm() ? llm : cheap).push_back(c);
        }
        std::vector<Conjunct> ordered = cheap;
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](const Conjunct &a, const Conjunct &b) {
                           return conjunct_selectivity(a, stats, config) <
                                  conjunct_selectivity(b, stats, config);
                         });

        bool reordered = false;
        for (size_t i = 0; i < ordered.size(); ++i) {
          if (ordered[i].display != cheap[i].display) reordered = true;
        }
        if (llm.empty() && !reordered) return;

        changed = true;
        std::unique_ptr<PlanNode> current;
        if (ordered.empty()) {
          current = std::move(filter.children[0]);
        } else {
          filter.conjuncts = std::move(ordered);
          current = std::move(slot);
        }
        for (auto &conjunct : llm) {
          auto llm_filter = std::make_unique<PlanNode>();
          llm_filter->kind = OpKind::LlmFilter;
          llm_filter->llm = std::move(conjunct.llm);
          llm_filter->expected = conjunct.expected;
          llm_filter->children.push_back(std::move(current));
          current = std::move(llm_filter);
        }
        slot = std::move(current);
      };
  walk(plan.root);
  if (changed) plan.renumber();
  return changed;
}

// R3: push non-LLM filters that do not reference the retrieved context below
// the SimilarityTopK probe.
bool apply_r3(LogicalPlan &plan) {
  bool changed = false;
  std::function<void(std::unique_ptr<PlanNode> &)> walk =
      [&](std::unique_ptr<PlanNode> &slot) {
        for (auto &child : slot->children) walk(child);
        if (slot->kind != OpKind::Filter || slot->children.empty() ||
            slot->children[0]->kind != OpKind::SimilarityTopK) {
          return;
        }
        PlanNode &filter = *slot;
        PlanNode &topk = *filter.children[0];
        std::vector<Conjunct> movable, kept;
        for (auto &c : filter.conjuncts) {
          bool touches_context = false;
          for (const Operand *op : {&c.lhs, &c.rhs}) {
            if (op->is_column && op->slot == topk.context_slot) {
              touches_context = true;
            }
          }
          if (!c.is_llm() && !touches_context) {
            movable.push_back(c);
          } else {
            kept.push_back(c);
          }
        }
        if (movable.empty()) return;
        changed = true;

        auto pushed = std::make_unique<PlanNode>();
        pushed->kind = OpKind::Filter;
        pushed->conjuncts = std::move(movable);
        pushed->children.push_back(std::move(topk.children[0]));
        topk.children[0] = std::move(pushed);

        if (kept.empty()) {
          slot = std::move(filter.children[0]);
        } else {
          filter.conjuncts = std::move(kept);
        }
      };
  walk(plan.root);
  if (changed) plan.renumber();
  return changed;
}

// R4: mark LLM operators whose rendered-argument distinct count is below the
// input row count as cacheable.
bool apply_r4(LogicalPlan &plan, const StatsProvider &stats,
              const PlannerConfig &config) {
  annotate_estimates(plan, stats, config);
  bool changed = false;
  std::function<void(PlanNode &)> walk = [&](PlanNode &node) {
    for (auto &child : node.children) walk(*child);
    const LlmCallSpec *spec = nullptr;
    if (node.kind == OpKind::LlmFilter || node.kind == OpKind::LlmAggregateMap) {
      spec = &*node.llm;
    } else if (node.kind == OpKind::Projection) {
      for (const auto &item : node.items) {
        if (item.is_llm) spec = &*item.llm;
      }
    }
    if (!spec || node.dedup) return;
    double in = node.children[0]->est_rows;
    double distinct = 0;
    if (node.kind == OpKind::Projection) {
      for (const auto &item : node.items) {
        if (item.is_llm) {
          distinct += llm_op_input_distinct(*item.llm, in, stats);
        }
      }
      double total_calls = 0;
      for (const auto &item : node.items) {
        if (item.is_llm) total_calls += in;
      }
      if (distinct >= total_calls) return;
    } else {
      distinct = llm_op_input_distinct(*spec, in, stats);
      if (distinct >= in) return;
    }
    node.dedup = true;
    node.est_distinct_prompts = distinct;
    changed = true;
  };
  if (plan.root) walk(*plan.root);
  return changed;
}

// R5: annotate LLM operators to sort their input by the argument column with
// the lowest distinct count, making equal prompt prefixes adjacent.
bool apply_r5(LogicalPlan &plan, const StatsProvider &stats,
              const PlannerConfig &config) {
  annotate_estimates(plan, stats, config);
  bool changed = false;
  std::function<void(PlanNode &)> walk = [&](PlanNode &node) {
    for (auto &child : node.children) walk(*child);
    if (node.reorder) return;
    const LlmCallSpec *spec = nullptr;
    if (node.kind == OpKind::LlmFilter || node.kind == OpKind::LlmAggregateMap) {
      spec = &*node.llm;
    } else if (node.kind == OpKind::Projection) {
      for (const auto &item : node.items) {
        if (item.is_llm) {
          spec = &*item.llm;
          break;
        }
      }
    }
    if (!spec) return;

    int best_table = -1, best_column = -1;
    size_t best_slot = 0;
    std::string best_display;
    int64_t best_distinct = 0;
    for (size_t a = 0; a < spec->arg_sources.size(); ++a) {
      auto [t, c] = spec->arg_sources[a];
      if (t < 0) continue;
      int64_t d = stats.column(t, c).distinct_count;
      if (best_table < 0 || d < best_distinct) {
        best_table = t;
        best_column = c;
        best_slot = spec->arg_slots[a];
        best_display = spec->arg_displays[a];
        best_distinct = d;
      }
    }
    if (best_table < 0) return;
    double calls = node.dedup ? node.est_distinct_prompts
                              : node.children[0]->est_rows;
    if (static_cast<double>(std::max<int64_t>(best_distinct, 1)) >= calls) {
      return;  // no run of equal prefixes to share
    }
    node.reorder = true;
    node.reorder_slot = best_slot;
    node.reorder_table = best_table;
    node.reorder_column = best_column;
    node.reorder_display = best_display;
    changed = true;
  };
  if (plan.root) walk(*plan.root);
  return changed;
}

}  // namespace

LogicalPlan optimize(const LogicalPlan &input, const StatsProvider &stats,
                     const PlannerConfig &config) {
  LogicalPlan plan = input.clone();
  double current_cost = plan_cost(plan, stats, config);

  for (int round = 0; round < 8; ++round) {
    bool changed = false;

    // R1, cost-guarded per move: pushing relational work below a join must
    // buy a material improvement before it restructures the plan.
    while (true) {
      LogicalPlan saved = plan.clone();
      if (!apply_r1_once(plan)) break;
      double new_cost = plan_cost(plan, stats, config);
      if (new_cost <= current_cost * (1.0 - config.r1_min_relative_gain)) {
        current_cost = new_cost;
        changed = true;
      } else {
        plan = std::move(saved);
        annotate_estimates(plan, stats, config);
        break;
      }
    }

    auto guarded = [&](auto &&apply) {
      LogicalPlan saved = plan.clone();
      if (!apply()) return;
      double new_cost = plan_cost(plan, stats, config);
      if (new_cost <= current_cost) {
        current_cost = new_cost;
        changed = true;
      } else {
        plan = std::move(saved);
        annotate_estimates(plan, stats, config);
      }
    };
    guarded([&] { return apply_r2(plan, stats, config); });
    guarded([&] { return apply_r3(plan); });
    guarded([&] { return apply_r4(plan, stats, config); });
    guarded([&] { return apply_r5(plan, stats, config); });

    if (!changed) break;
  }

  annotate_estimates(plan, stats, config);
  plan.renumber();
  return plan;
}

}  // namespace relm::plan
