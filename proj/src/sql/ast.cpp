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

#include "relm/sql/ast.hpp"

#include <algorithm>
#include <sstream>

#include "relm/common/error.hpp"

namespace relm::sql {

const char *compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

Expr Expr::make_column(ColumnRef ref) {
  Expr e;
  e.kind = Kind::Column;
  e.column = std::move(ref);
  return e;
}

Expr Expr::make_literal(Value v) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = std::move(v);
  return e;
}

Expr Expr::make_llm(LlmInvocation inv) {
  Expr e;
  e.kind = Kind::Llm;
  e.llm = std::move(inv);
  return e;
}

Expr Expr::make_avg(AvgCall avg) {
  Expr e;
  e.kind = Kind::Avg;
  e.avg = std::move(avg);
  return e;
}

std::vector<std::string> extract_placeholders(const std::string &template_text) {
  std::vector<std::string> names;
  size_t pos = 0;
  while (pos < template_text.size()) {
    char c = template_text[pos];
    if (c == '{') {
      size_t close = template_text.find('}', pos + 1);
      if (close == std::string::npos) {
        throw EngineError(ErrorCode::Syntax,
                          "unbalanced '{' in prompt template", 0, 0);
      }
      std::string name = template_text.substr(pos + 1, close - pos - 1);
      if (name.find('{') != std::string::npos) {
        throw EngineError(ErrorCode::Syntax,
                          "nested '{' in prompt template", 0, 0);
      }
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(name);
      }
      pos = close + 1;
    } else if (c == '}') {
      throw EngineError(ErrorCode::Syntax, "unbalanced '}' in prompt template",
                        0, 0);
    } else {
      ++pos;
    }
  }
  return names;
}

namespace {

std::string quote_string(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string print_literal(const Value &v) {
  if (v.is_null()) return "NULL";
  if (v.is_bool()) return v.as_bool() ? "TRUE" : "FALSE";
  if (v.is_text()) return quote_string(v.as_text());
  return v.to_text();
}

std::string print_column(const ColumnRef &ref) { return ref.display(); }

std::string print_llm(const LlmInvocation &inv) {
  std::ostringstream out;
  out << "LLM(" << quote_string(inv.template_text);
  for (const auto &arg : inv.args) {
    out << ", ";
    if (arg.kind == LlmArg::Kind::Similarity) {
      out << "SIMILARITY_SEARCH(" << print_column(arg.similarity.query);
      if (arg.similarity.k) out << ", " << *arg.similarity.k;
      out << ")";
    } else {
      out << print_column(arg.column);
    }
  }
  out << ")";
  switch (inv.returning.kind) {
    case ReturningClause::Kind::None:
      break;
    case ReturningClause::Kind::Text:
      out << " RETURNING TEXT";
      break;
    case ReturningClause::Kind::IntRange:
      out << " RETURNING INT BETWEEN " << inv.returning.lo << " AND "
          << inv.returning.hi;
      break;
    case ReturningClause::Kind::Choice: {
      out << " RETURNING CHOICE(";
      for (size_t i = 0; i < inv.returning.choices.size(); ++i) {
        if (i) out << ", ";
        out << quote_string(inv.returning.choices[i]);
      }
      out << ")";
      break;
    }
  }
  return out.str();
}

std::string print_expr(const Expr &expr) {
  switch (expr.kind) {
    case Expr::Kind::Column: return print_column(expr.column);
    case Expr::Kind::Literal: return print_literal(expr.literal);
    case Expr::Kind::Llm: return print_llm(*expr.llm);
    case Expr::Kind::Avg:
      return "AVG(" + (expr.avg->llm ? print_llm(*expr.avg->llm)
                                     : print_column(*expr.avg->column)) +
             ")";
  }
  return "";
}

std::string print_operand(const Operand &operand) {
  return operand.is_column ? print_column(operand.column)
                           : print_literal(operand.literal);
}

std::string print_predicate(const Predicate &pred) {
  switch (pred.kind) {
    case Predicate::Kind::Comparison:
      return print_operand(pred.lhs) + " " + compare_op_text(pred.op) + " " +
             print_operand(pred.rhs);
    case Predicate::Kind::BoolLiteral:
      return pred.bool_value ? "TRUE" : "FALSE";
    case Predicate::Kind::LlmEquality:
      return print_llm(*pred.llm) + " = " + quote_string(pred.expected);
  }
  return "";
}

}  // namespace

std::string literal_display(const Value &v) { return print_literal(v); }

std::string print(const QueryAst &ast) {
  std::ostringstream out;
  out << "SELECT ";
  for (size_t i = 0; i < ast.select_items.size(); ++i) {
    if (i) out << ", ";
    out << print_expr(ast.select_items[i].expr);
    if (!ast.select_items[i].alias.empty()) {
      out << " AS " << ast.select_items[i].alias;
    }
  }
  out << " FROM " << ast.from.table;
  if (!ast.from.alias.empty()) out << " " << ast.from.alias;
  for (const auto &join : ast.joins) {
    out << " JOIN " << join.table.table;
    if (!join.table.alias.empty()) out << " " << join.table.alias;
    out << " ON " << print_column(join.left) << " = " << print_column(join.right);
  }
  if (!ast.where_conjuncts.empty()) {
    out << " WHERE ";
    for (size_t i = 0; i < ast.where_conjuncts.size(); ++i) {
      if (i) out << " AND ";
      out << print_predicate(ast.where_conjuncts[i]);
    }
  }
  if (!ast.group_by.empty()) {
    out << " GROUP BY ";
    for (size_t i = 0; i < ast.group_by.size(); ++i) {
      if (i) out << ", ";
      out << print_column(ast.group_by[i]);
    }
  }
  return out.str();
}

}  // namespace relm::sql
