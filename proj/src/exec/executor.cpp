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

#include "relm/exec/executor.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"
#include "relm/exec/morsel.hpp"
#include "relm/llm/prompt.hpp"

namespace relm::exec {

using plan::Conjunct;
using plan::LlmCallSpec;
using plan::LogicalPlan;
using plan::OpKind;
using plan::PlanNode;

nlohmann::json RunMetrics::to_json() const {
  nlohmann::json doc = scheduler.to_json();
  doc["embed_calls"] = embed_calls;
  doc["sim_candidate_rows"] = sim_candidate_rows;
  doc["peak_intermediate_rows"] = peak_intermediate_rows;
  doc["dedup_cache_hits"] = dedup_cache_hits;
  doc["dedup_cache_lookups"] = dedup_cache_lookups;
  return doc;
}

namespace {

bool compare_values(const Value &lhs, sql::CompareOp op, const Value &rhs) {
  if (lhs.is_null() || rhs.is_null()) return false;

  int cmp;
  if (lhs.is_numeric() && rhs.is_numeric()) {
    double a = lhs.numeric(), b = rhs.numeric();
    cmp = a < b ? -1 : (a > b ? 1 : 0);
  } else if (lhs.is_text() && rhs.is_text()) {
    cmp = lhs.as_text().compare(rhs.as_text());
    cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
  } else if (lhs.is_bool() && rhs.is_bool()) {
    if (op != sql::CompareOp::Eq && op != sql::CompareOp::Ne) {
      throw EngineError(ErrorCode::TypeError,
                        "booleans only support equality comparison");
    }
    cmp = lhs.as_bool() == rhs.as_bool() ? 0 : 1;
    return op == sql::CompareOp::Eq ? cmp == 0 : cmp != 0;
  } else {
    throw EngineError(ErrorCode::TypeError,
                      "cannot compare " + lhs.to_text() + " with " +
                          rhs.to_text());
  }

  switch (op) {
    case sql::CompareOp::Eq: return cmp == 0;
    case sql::CompareOp::Ne: return cmp != 0;
    case sql::CompareOp::Lt: return cmp < 0;
    case sql::CompareOp::Le: return cmp <= 0;
    case sql::CompareOp::Gt: return cmp > 0;
    case sql::CompareOp::Ge: return cmp >= 0;
  }
  return false;
}

uint64_t row_key_hash(const WideRow &row, const std::vector<size_t> &slots) {
  uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (size_t slot : slots) h = hash_combine(h, row[slot].hash());
  return h;
}

struct TableSpan {
  size_t offset;
  size_t arity;
};

class Evaluator {
 public:
  Evaluator(const LogicalPlan &plan, const Catalog &catalog, Backend &backend,
            const SchedulerConfig &scheduler_config, const ExecConfig &config,
            const VectorIndex *index, Embedder *embedder, RunMetrics &metrics)
      : plan_(plan),
        catalog_(catalog),
        backend_(backend),
        scheduler_config_(scheduler_config),
        config_(config),
        index_(index),
        embedder_(embedder),
        metrics_(metrics) {}

  Table run() {
    const PlanNode &root = *plan_.root;
    std::vector<ColumnDef> defs;
    for (size_t i = 0; i < plan_.output_names.size(); ++i) {
      defs.push_back({plan_.output_names[i], plan_.output_types[i]});
    }
    Table result("result", Schema(std::move(defs)));

    if (root.kind == OpKind::Aggregate) {
      Rows input = eval(*root.children[0]);
      emit_aggregate(root, input, result);
    } else if (root.kind == OpKind::Projection) {
      Rows input = eval(*root.children[0]);
      emit_projection(root, input, result);
    } else {
      throw EngineError(ErrorCode::Internal, "plan root must project");
    }

    metrics_.dedup_cache_hits = dedup_.hits();
    metrics_.dedup_cache_lookups = dedup_.lookups();
    return result;
  }

 private:
  Rows eval(const PlanNode &node) {
    Rows rows;
    switch (node.kind) {
      case OpKind::Scan: rows = eval_scan(node); break;
      case OpKind::Filter:
        rows = eval(*node.children[0]);
        rows = eval_filter_conjuncts(node, std::move(rows));
        break;
      case OpKind::HashJoin: rows = eval_join(node); break;
      case OpKind::LlmFilter:
        rows = eval(*node.children[0]);
        rows = eval_llm_filter(node, std::move(rows));
        break;
      case OpKind::HashGroupBy:
        rows = eval(*node.children[0]);
        eval_group_by(node, rows);
        break;
      case OpKind::LlmAggregateMap:
        rows = eval(*node.children[0]);
        eval_aggregate_map(node, rows);
        break;
      case OpKind::SimilarityTopK:
        rows = eval(*node.children[0]);
        eval_similarity(node, rows);
        break;
      case OpKind::Aggregate:
      case OpKind::Projection:
        throw EngineError(ErrorCode::Internal,
                          "nested projection/aggregate is not supported");
    }
    metrics_.peak_intermediate_rows =
        std::max(metrics_.peak_intermediate_rows,
                 static_cast<int64_t>(rows.size()));
    return rows;
  }

  Rows eval_scan(const PlanNode &node) {
    auto table = catalog_.get_table(node.table_name);
    size_t offset = plan_.table_offsets[static_cast<size_t>(node.table_index)];
    Rows rows;
    rows.reserve(table->row_count());
    for (const auto &source : table->rows()) {
      WideRow row(plan_.total_width);
      for (size_t c = 0; c < source.size(); ++c) row[offset + c] = source[c];
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::vector<TableSpan> subtree_spans(const PlanNode &node) {
    std::vector<TableSpan> spans;
    if (node.kind == OpKind::Scan) {
      size_t ti = static_cast<size_t>(node.table_index);
      size_t arity = catalog_.get_table(plan_.table_names[ti])->schema().arity();
      spans.push_back({plan_.table_offsets[ti], arity});
    }
    for (const auto &child : node.children) {
      auto nested = subtree_spans(*child);
      spans.insert(spans.end(), nested.begin(), nested.end());
    }
    return spans;
  }

  Rows eval_join(const PlanNode &node) {
    Rows probe = eval(*node.children[0]);
    Rows build = eval(*node.children[1]);
    std::vector<TableSpan> build_spans = subtree_spans(*node.children[1]);

    std::unordered_map<uint64_t, std::vector<size_t>> table_map;
    for (size_t i = 0; i < build.size(); ++i) {
      const Value &key = build[i][node.build_key.slot];
      if (key.is_null()) continue;
      table_map[key.hash()].push_back(i);
    }

    Rows out;
    for_each_morsel(probe, config_.morsel_size, [&](Morsel &morsel) {
      for (size_t i = 0; i < morsel.size(); ++i) {
        const WideRow &row = morsel.row(i);
        const Value &key = row[node.probe_key.slot];
        if (key.is_null()) continue;
        auto it = table_map.find(key.hash());
        if (it == table_map.end()) continue;
        for (size_t bi : it->second) {
          const WideRow &match = build[bi];
          if (!(match[node.build_key.slot] == key)) continue;  // hash collision
          WideRow merged = row;
          for (const auto &span : build_spans) {
            for (size_t c = 0; c < span.arity; ++c) {
              merged[span.offset + c] = match[span.offset + c];
            }
          }
          out.push_back(std::move(merged));
        }
      }
    });
    return out;
  }

  // Short-circuit left to right; LLM conjuncts reach the scheduler only for
  // rows that survived every earlier conjunct.
  Rows eval_filter_conjuncts(const PlanNode &node, Rows rows) {
    for (const auto &conjunct : node.conjuncts) {
      if (rows.empty()) break;
      switch (conjunct.kind) {
        case Conjunct::Kind::BoolLiteral:
          if (!conjunct.bool_value) rows.clear();
          break;
        case Conjunct::Kind::Comparison: {
          Rows kept;
          kept.reserve(rows.size());
          for_each_morsel(rows, config_.morsel_size, [&](Morsel &morsel) {
            for (size_t i = 0; i < morsel.size(); ++i) {
              WideRow &row = morsel.row(i);
              const Value &lhs = conjunct.lhs.is_column
                                     ? row[conjunct.lhs.slot]
                                     : conjunct.lhs.literal;
              const Value &rhs = conjunct.rhs.is_column
                                     ? row[conjunct.rhs.slot]
                                     : conjunct.rhs.literal;
              if (compare_values(lhs, conjunct.op, rhs)) {
                kept.push_back(std::move(row));
              }
            }
          });
          rows = std::move(kept);
          break;
        }
        case Conjunct::Kind::Llm:
          rows = llm_predicate_filter(node, *conjunct.llm, conjunct.expected,
                                      std::move(rows));
          break;
      }
    }
    return rows;
  }

  Rows eval_llm_filter(const PlanNode &node, Rows rows) {
    return llm_predicate_filter(node, *node.llm, node.expected, std::move(rows));
  }

  Rows llm_predicate_filter(const PlanNode &node, const LlmCallSpec &spec,
                            const std::string &expected, Rows rows) {
    if (rows.empty()) return rows;
    auto values = run_llm(node, spec, rows);
    Rows kept;
    kept.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!values[i].has_value()) continue;  // policy-nulled rows drop out
      const TypedValue &v = *values[i];
      // Diagnostic mode hands back raw text; exact equality then mirrors a
      // system without validation.
      if (v.kind == TypedValueKind::Label || v.kind == TypedValueKind::Text) {
        if (v.text == expected) kept.push_back(std::move(rows[i]));
      }
    }
    return kept;
  }

  void eval_group_by(const PlanNode &node, Rows &rows) {
    std::unordered_map<uint64_t, int64_t> group_ids;
    for (auto &row : rows) {
      uint64_t key = row_key_hash(row, node.key_slots);
      auto [it, inserted] =
          group_ids.emplace(key, static_cast<int64_t>(group_ids.size()));
      row[node.group_slot] = Value(it->second);
    }
  }

  void eval_aggregate_map(const PlanNode &node, Rows &rows) {
    if (rows.empty()) return;
    auto values = run_llm(node, *node.llm, rows);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!values[i].has_value()) continue;  // stays NULL, AVG skips it
      const TypedValue &v = *values[i];
      if (v.kind == TypedValueKind::Score) {
        rows[i][node.score_slot] = Value(v.score);
      } else {
        // Validation disabled: the raw text must parse as a bare integer.
        std::string trimmed = trim_whitespace(v.text);
        int64_t parsed = 0;
        auto res = std::from_chars(trimmed.data(),
                                   trimmed.data() + trimmed.size(), parsed);
        if (res.ec != std::errc() ||
            res.ptr != trimmed.data() + trimmed.size() || trimmed.empty()) {
          throw EngineError(ErrorCode::TypeCoercion,
                            "AVG cannot parse model output '" + v.text + "'");
        }
        rows[i][node.score_slot] = Value(parsed);
      }
    }
  }

  void eval_similarity(const PlanNode &node, Rows &rows) {
    if (rows.empty()) return;
    if (!index_ || !embedder_) {
      throw EngineError(ErrorCode::Plan,
                        "no vector index loaded for " + node.index_ref);
    }
    auto dot = node.index_ref.find('.');
    auto corpus = catalog_.get_table(node.index_ref.substr(0, dot));
    auto corpus_col = corpus->schema().index_of(node.index_ref.substr(dot + 1));
    if (!corpus_col) {
      throw EngineError(ErrorCode::UnknownColumn,
                        "index column vanished: " + node.index_ref);
    }

    std::vector<std::string> questions;
    questions.reserve(rows.size());
    for (const auto &row : rows) {
      const Value &q = row[node.query_slot];
      questions.push_back(q.is_null() ? "" : q.to_text());
    }
    auto embeddings = embedder_->embed(questions);
    metrics_.embed_calls += static_cast<int64_t>(questions.size());

    for (size_t i = 0; i < rows.size(); ++i) {
      auto hits = index_->top_k(embeddings[i], static_cast<size_t>(node.k));
      metrics_.sim_candidate_rows += static_cast<int64_t>(hits.size());
      std::string context;
      for (size_t h = 0; h < hits.size(); ++h) {
        if (hits[h].row_id < 0 ||
            static_cast<size_t>(hits[h].row_id) >= corpus->row_count()) {
          throw EngineError(ErrorCode::Internal,
                            "index refers to rows the corpus no longer has; "
                            "re-run ingest --embed for " + node.index_ref);
        }
        if (h) context += config_.context_separator;
        const Value &text =
            corpus->at(static_cast<size_t>(hits[h].row_id), *corpus_col);
        context += text.is_null() ? "" : text.to_text();
      }
      rows[i][node.context_slot] = Value(std::move(context));
    }
  }

  void emit_projection(const PlanNode &node, Rows &rows, Table &result) {
    std::vector<std::vector<std::optional<TypedValue>>> llm_values;
    for (const auto &item : node.items) {
      if (item.is_llm) {
        llm_values.push_back(rows.empty()
                                 ? std::vector<std::optional<TypedValue>>{}
                                 : run_llm(node, *item.llm, rows));
      } else {
        llm_values.emplace_back();
      }
    }
    for (size_t i = 0; i < rows.size(); ++i) {
      Row out;
      out.reserve(node.items.size());
      for (size_t j = 0; j < node.items.size(); ++j) {
        const auto &item = node.items[j];
        if (item.is_llm) {
          const auto &v = llm_values[j][i];
          out.push_back(v ? v->to_value() : Value::null());
        } else {
          out.push_back(rows[i][item.source_slot]);
        }
      }
      result.append_row(std::move(out));
    }
  }

  void emit_aggregate(const PlanNode &node, Rows &rows, Table &result) {
    // Group ordinals are dense and first-appearance ordered.
    int64_t group_count = 0;
    for (const auto &row : rows) {
      group_count = std::max(group_count, row[node.group_slot].as_int() + 1);
    }

    struct ItemAccum {
      int64_t int_sum = 0;     // exact sum for integer inputs
      double float_sum = 0.0;  // plain AVG over float columns
      bool any_float = false;
      int64_t count = 0;
    };
    struct GroupAccum {
      bool seen = false;
      WideRow first;
      std::vector<ItemAccum> items;
    };
    std::vector<GroupAccum> groups(static_cast<size_t>(group_count));
    for (auto &g : groups) g.items.resize(node.agg_items.size());

    for (const auto &row : rows) {
      auto &group = groups[static_cast<size_t>(row[node.group_slot].as_int())];
      if (!group.seen) {
        group.seen = true;
        group.first = row;
      }
      for (size_t j = 0; j < node.agg_items.size(); ++j) {
        const auto &item = node.agg_items[j];
        if (item.kind == plan::AggItem::Kind::GroupKey) continue;
        const Value &v = row[item.slot];
        if (v.is_null()) continue;
        auto &accum = group.items[j];
        if (v.is_int()) {
          accum.int_sum += v.as_int();
        } else if (v.is_float()) {
          accum.any_float = true;
          accum.float_sum += v.as_float();
        } else {
          throw EngineError(ErrorCode::TypeError,
                            "AVG over non-numeric value " + v.to_text());
        }
        ++accum.count;
      }
    }

    for (const auto &group : groups) {
      if (!group.seen) continue;
      Row out;
      out.reserve(node.agg_items.size());
      for (size_t j = 0; j < node.agg_items.size(); ++j) {
        const auto &item = node.agg_items[j];
        if (item.kind == plan::AggItem::Kind::GroupKey) {
          out.push_back(group.first[item.slot]);
          continue;
        }
        const auto &accum = group.items[j];
        if (accum.count == 0) {
          out.push_back(Value::null());  // all-null group
        } else {
          // Exact sums, divided once; no accumulation drift at desk scale.
          double total = accum.float_sum + static_cast<double>(accum.int_sum);
          out.push_back(Value(total / static_cast<double>(accum.count)));
        }
      }
      result.append_row(std::move(out));
    }
  }

  // Renders, dedups, schedules, and restores input order for one LLM
  // operator over `rows`. Returns one optional value per row (nullopt when
  // the null-value policy absorbed a failure).
  std::vector<std::optional<TypedValue>> run_llm(const PlanNode &node,
                                                 const LlmCallSpec &spec,
                                                 const Rows &rows) {
    // Stage ids keep row tags unique across the execution even when one
    // Filter evaluates several inline LLM conjuncts.
    const int32_t stage_id = next_stage_id_++;
    std::vector<size_t> order(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) order[i] = i;
    if (node.reorder) {
      // Prefix-share reorder: equal values of the lowest-cardinality
      // argument become adjacent in submission order.
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return rows[a][node.reorder_slot].to_text() <
               rows[b][node.reorder_slot].to_text();
      });
    }

    std::vector<InferenceRequest> requests;
    requests.reserve(rows.size());
    for (size_t pos = 0; pos < order.size(); ++pos) {
      size_t i = order[pos];
      std::vector<Value> args;
      args.reserve(spec.arg_slots.size());
      for (size_t slot : spec.arg_slots) args.push_back(rows[i][slot]);

      InferenceRequest request;
      request.request_id = next_request_id_++;
      request.rendered_prompt =
          render_prompt(spec.template_text, spec.placeholders, args);
      request.system_prompt = kSystemPrompt;
      request.contract = spec.contract;
      request.constrained = spec.contract.is_constrained();
      request.row_tag = {stage_id, static_cast<int64_t>(i)};
      request.max_output_tokens = request.constrained
                                      ? config_.constrained_output_tokens
                                      : config_.free_text_output_tokens;
      if (spec.contract.kind == ContractKind::SchemaText) {
        request.max_output_tokens = config_.free_text_output_tokens;
      }
      if (config_.dedup_enabled) {
        uint64_t args_hash = 0x51ed270b9f8fULL;
        for (const auto &arg : args) {
          args_hash = hash_combine(args_hash, arg.hash());
        }
        uint64_t call_hash =
            hash_combine(spec.template_hash, spec.contract.fingerprint());
        request.dedup_key = dedup_key(call_hash, args_hash);
      }
      requests.push_back(std::move(request));
    }

    Scheduler scheduler(scheduler_config_, backend_,
                        config_.dedup_enabled ? &dedup_ : nullptr);
    auto outcomes = scheduler.run(std::move(requests));
    metrics_.scheduler.merge(scheduler.metrics());

    std::vector<std::optional<TypedValue>> values(rows.size());
    for (const auto &outcome : outcomes) {
      size_t i = static_cast<size_t>(outcome.tag.ordinal);
      if (outcome.value) {
        values[i] = outcome.value;
      } else if (outcome.error) {
        throw EngineError(outcome.error->code, outcome.error->message);
      }
    }
    return values;
  }

  const LogicalPlan &plan_;
  const Catalog &catalog_;
  Backend &backend_;
  const SchedulerConfig &scheduler_config_;
  const ExecConfig &config_;
  const VectorIndex *index_;
  Embedder *embedder_;
  RunMetrics &metrics_;
  DedupCache dedup_;
  uint64_t next_request_id_ = 1;
  int32_t next_stage_id_ = 1;
};

}  // namespace

ExecResult Executor::execute(const plan::LogicalPlan &plan) {
  ExecResult result;
  Evaluator evaluator(plan, catalog_, backend_, scheduler_config_, config_,
                      index_, embedder_, result.metrics);
  result.table = evaluator.run();
  return result;
}

}  // namespace relm::exec

namespace relm {

uint64_t dedup_key(uint64_t template_hash, uint64_t arg_tuple_hash) {
  uint64_t key = hash_combine(template_hash, arg_tuple_hash);
  return key == 0 ? 1 : key;  // 0 is reserved for "not deduplicable"
}

}  // namespace relm
