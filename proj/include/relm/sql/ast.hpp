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

#include <optional>
#include <string>
#include <vector>

#include "relm/common/value.hpp"
#include "relm/llm/contract.hpp"

namespace relm::sql {

enum class LlmSite {
  SelectProjection,
  WherePredicate,
  AggregateInput,
  RagGeneration,
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

const char *compare_op_text(CompareOp op);

struct ColumnRef {
  std::string qualifier;  // table name or alias; empty when unqualified
  std::string name;

  // Filled by the binder.
  int table_index = -1;
  int column_index = -1;
  ColumnType type = ColumnType::Text;

  bool bound() const { return table_index >= 0; }
  std::string display() const {
    return qualifier.empty() ? name : qualifier + "." + name;
  }
};

struct SimilaritySearch {
  ColumnRef query;
  std::optional<int64_t> k;  // engine default when absent
};

struct LlmArg {
  enum class Kind { Column, Similarity };
  Kind kind = Kind::Column;
  ColumnRef column;
  SimilaritySearch similarity;
};

struct ReturningClause {
  enum class Kind { None, Text, IntRange, Choice };
  Kind kind = Kind::None;
  int64_t lo = 0, hi = 0;
  std::vector<std::string> choices;
};

/// `LLM("... {a} ... {b} ...", x, y)`. Placeholders are matched to args by
/// position of first appearance; names are kept only for rendering.
struct LlmInvocation {
  std::string template_text;
  std::vector<std::string> placeholders;  // distinct, in first-appearance order
  std::vector<LlmArg> args;
  ReturningClause returning;

  // Filled by the binder.
  LlmSite site = LlmSite::SelectProjection;
  OutputContract contract;
  bool contract_set = false;
};

/// AVG over either an LLM invocation or a plain column.
struct AvgCall {
  std::optional<LlmInvocation> llm;
  std::optional<ColumnRef> column;
};

struct Expr {
  enum class Kind { Column, Literal, Llm, Avg };
  Kind kind = Kind::Column;
  ColumnRef column;
  Value literal;
  std::optional<LlmInvocation> llm;
  std::optional<AvgCall> avg;

  static Expr make_column(ColumnRef ref);
  static Expr make_literal(Value v);
  static Expr make_llm(LlmInvocation inv);
  static Expr make_avg(AvgCall avg);
};

struct SelectItem {
  Expr expr;
  std::string alias;  // empty when none
};

struct TableRef {
  std::string table;
  std::string alias;  // empty when none

  const std::string &binding_name() const { return alias.empty() ? table : alias; }
};

struct JoinClause {
  TableRef table;
  ColumnRef left;
  ColumnRef right;
};

struct Operand {
  bool is_column = false;
  ColumnRef column;
  Value literal;
};

struct Predicate {
  enum class Kind { Comparison, BoolLiteral, LlmEquality };
  Kind kind = Kind::Comparison;

  // Comparison
  Operand lhs;
  CompareOp op = CompareOp::Eq;
  Operand rhs;

  // BoolLiteral
  bool bool_value = true;

  // LlmEquality: LLM(...) == "literal"
  std::optional<LlmInvocation> llm;
  std::string expected;

  bool is_llm() const { return kind == Kind::LlmEquality; }
};

struct QueryAst {
  std::vector<SelectItem> select_items;
  TableRef from;
  std::vector<JoinClause> joins;
  std::vector<Predicate> where_conjuncts;
  std::vector<ColumnRef> group_by;
};

/// Canonical single-line rendering. parse(print(ast)) reproduces the same
/// printed form (fixed-point), which the round-trip tests rely on.
std::string print(const QueryAst &ast);

/// Distinct placeholder names in `{...}` order of first appearance.
/// Throws SyntaxError on unbalanced braces.
std::vector<std::string> extract_placeholders(const std::string &template_text);

/// SQL-literal rendering shared by the printer and EXPLAIN (strings in
/// double quotes, booleans as TRUE/FALSE).
std::string literal_display(const Value &v);

}  // namespace relm::sql
