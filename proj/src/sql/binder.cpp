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

#include "relm/sql/binder.hpp"

#include <algorithm>

#include "relm/common/error.hpp"

namespace relm::sql {

OutputContract infer_contract(const LlmInvocation &invocation,
                              const ContractContext &context,
                              const ContractDefaults &defaults) {
  const ReturningClause &ret = invocation.returning;
  switch (context.site) {
    case LlmSite::WherePredicate: {
      // The predicate compares against a literal; the model must answer from
      // a closed set containing it.
      switch (ret.kind) {
        case ReturningClause::Kind::None: {
          std::vector<std::string> members{context.expected_literal};
          members.push_back(context.expected_literal == "Yes"
                                ? "No"
                                : defaults.choice_complement);
          return OutputContract::choice(std::move(members));
        }
        case ReturningClause::Kind::Choice: {
          auto &set = ret.choices;
          if (std::find(set.begin(), set.end(), context.expected_literal) ==
              set.end()) {
            throw EngineError(ErrorCode::ContractConflict,
                              "RETURNING CHOICE does not contain the compared "
                              "literal '" +
                                  context.expected_literal + "'");
          }
          return OutputContract::choice(set);
        }
        case ReturningClause::Kind::Text:
        case ReturningClause::Kind::IntRange:
          throw EngineError(ErrorCode::ContractConflict,
                            "predicate compared to a string literal requires "
                            "a choice contract");
      }
      break;
    }
    case LlmSite::AggregateInput: {
      switch (ret.kind) {
        case ReturningClause::Kind::None:
          return OutputContract::int_range(defaults.aggregate_lo,
                                           defaults.aggregate_hi);
        case ReturningClause::Kind::IntRange:
          return OutputContract::int_range(ret.lo, ret.hi);
        case ReturningClause::Kind::Text:
        case ReturningClause::Kind::Choice:
          throw EngineError(ErrorCode::ContractConflict,
                            "AVG requires an integer contract, got RETURNING " +
                                std::string(ret.kind ==
                                                    ReturningClause::Kind::Text
                                                ? "TEXT"
                                                : "CHOICE"));
      }
      break;
    }
    case LlmSite::SelectProjection:
    case LlmSite::RagGeneration: {
      switch (ret.kind) {
        case ReturningClause::Kind::None:
        case ReturningClause::Kind::Text:
          return OutputContract::free_text();
        case ReturningClause::Kind::IntRange:
          return OutputContract::int_range(ret.lo, ret.hi);
        case ReturningClause::Kind::Choice:
          return OutputContract::choice(ret.choices);
      }
      break;
    }
  }
  return OutputContract::free_text();
}

namespace {

class Binder {
 public:
  Binder(const Catalog &catalog, const ContractDefaults &defaults)
      : catalog_(catalog), defaults_(defaults) {}

  BoundQuery bind(const QueryAst &ast) {
    BoundQuery bound;
    bound.ast = ast;
    bind_table(bound, bound.ast.from);
    for (auto &join : bound.ast.joins) {
      bind_table(bound, join.table);
      resolve(bound, join.left);
      resolve(bound, join.right);
      if (join.left.table_index == join.right.table_index) {
        throw EngineError(ErrorCode::Plan,
                          "join condition must relate two distinct tables");
      }
    }

    for (size_t i = 0; i < bound.ast.select_items.size(); ++i) {
      auto &item = bound.ast.select_items[i];
      bind_expr(bound, item.expr);
      bound.output_names.push_back(output_name(item, i));
    }
    for (auto &pred : bound.ast.where_conjuncts) bind_predicate(bound, pred);
    for (auto &col : bound.ast.group_by) resolve(bound, col);
    return bound;
  }

 private:
  void bind_table(BoundQuery &bound, const TableRef &ref) {
    auto table = catalog_.get_table(ref.table);  // throws UnknownTable
    for (const auto &existing : bound.tables) {
      if (existing.binding == ref.binding_name()) {
        throw EngineError(ErrorCode::AmbiguousColumn,
                          "duplicate table binding: " + ref.binding_name());
      }
    }
    bound.tables.push_back({ref.table, ref.binding_name(), std::move(table)});
  }

  void resolve(BoundQuery &bound, ColumnRef &ref) {
    if (!ref.qualifier.empty()) {
      for (size_t i = 0; i < bound.tables.size(); ++i) {
        const auto &t = bound.tables[i];
        if (t.binding == ref.qualifier || t.name == ref.qualifier) {
          auto idx = t.table->schema().index_of(ref.name);
          if (!idx) {
            throw EngineError(ErrorCode::UnknownColumn,
                              "unknown column: " + ref.display());
          }
          ref.table_index = static_cast<int>(i);
          ref.column_index = static_cast<int>(*idx);
          ref.type = t.table->schema().column(*idx).type;
          return;
        }
      }
      throw EngineError(ErrorCode::UnknownTable,
                        "unknown table or alias: " + ref.qualifier);
    }
    int found_table = -1;
    int found_col = -1;
    for (size_t i = 0; i < bound.tables.size(); ++i) {
      auto idx = bound.tables[i].table->schema().index_of(ref.name);
      if (idx) {
        if (found_table >= 0) {
          throw EngineError(ErrorCode::AmbiguousColumn,
                            "ambiguous column: " + ref.name);
        }
        found_table = static_cast<int>(i);
        found_col = static_cast<int>(*idx);
      }
    }
    if (found_table < 0) {
      throw EngineError(ErrorCode::UnknownColumn,
                        "unknown column: " + ref.name);
    }
    ref.table_index = found_table;
    ref.column_index = found_col;
    ref.type =
        bound.tables[found_table].table->schema().column(found_col).type;
  }

  void bind_invocation(BoundQuery &bound, LlmInvocation &inv,
                       const ContractContext &base_context) {
    bool has_similarity = false;
    for (auto &arg : inv.args) {
      if (arg.kind == LlmArg::Kind::Similarity) {
        has_similarity = true;
        resolve(bound, arg.similarity.query);
      } else {
        resolve(bound, arg.column);
      }
    }
    if (inv.placeholders.size() != inv.args.size()) {
      throw EngineError(
          ErrorCode::PlaceholderArityMismatch,
          "template has " + std::to_string(inv.placeholders.size()) +
              " placeholder(s) but " + std::to_string(inv.args.size()) +
              " argument(s) were supplied");
    }
    ContractContext context = base_context;
    if (has_similarity) {
      if (context.site == LlmSite::SelectProjection) {
        context.site = LlmSite::RagGeneration;
      } else {
        throw EngineError(ErrorCode::UnsupportedFeature,
                          "SIMILARITY_SEARCH is only supported inside a "
                          "projection LLM call");
      }
      bound.has_rag = true;
    }
    inv.site = context.site;
    inv.contract = infer_contract(inv, context, defaults_);
    inv.contract_set = true;
  }

  void bind_expr(BoundQuery &bound, Expr &expr) {
    switch (expr.kind) {
      case Expr::Kind::Column:
        resolve(bound, expr.column);
        break;
      case Expr::Kind::Literal:
        break;
      case Expr::Kind::Llm:
        bind_invocation(bound, *expr.llm, {LlmSite::SelectProjection, ""});
        break;
      case Expr::Kind::Avg:
        if (expr.avg->llm) {
          bind_invocation(bound, *expr.avg->llm, {LlmSite::AggregateInput, ""});
        } else {
          resolve(bound, *expr.avg->column);
          if (expr.avg->column->type != ColumnType::Int64 &&
              expr.avg->column->type != ColumnType::Float64) {
            throw EngineError(ErrorCode::TypeError,
                              "AVG over non-numeric column " +
                                  expr.avg->column->display());
          }
        }
        break;
    }
  }

  void bind_predicate(BoundQuery &bound, Predicate &pred) {
    switch (pred.kind) {
      case Predicate::Kind::Comparison:
        if (pred.lhs.is_column) resolve(bound, pred.lhs.column);
        if (pred.rhs.is_column) resolve(bound, pred.rhs.column);
        break;
      case Predicate::Kind::BoolLiteral:
        break;
      case Predicate::Kind::LlmEquality:
        bind_invocation(bound, *pred.llm,
                        {LlmSite::WherePredicate, pred.expected});
        break;
    }
  }

  std::string output_name(const SelectItem &item, size_t index) {
    if (!item.alias.empty()) return item.alias;
    switch (item.expr.kind) {
      case Expr::Kind::Column:
        return item.expr.column.name;
      case Expr::Kind::Llm:
        return "llm_" + std::to_string(index + 1);
      case Expr::Kind::Avg:
        return "avg_" + std::to_string(index + 1);
      case Expr::Kind::Literal:
        return "literal_" + std::to_string(index + 1);
    }
    return "col_" + std::to_string(index + 1);
  }

  const Catalog &catalog_;
  const ContractDefaults &defaults_;
};

}  // namespace

BoundQuery bind(const QueryAst &ast, const Catalog &catalog,
                const ContractDefaults &defaults) {
  Binder binder(catalog, defaults);
  return binder.bind(ast);
}

}  // namespace relm::sql
