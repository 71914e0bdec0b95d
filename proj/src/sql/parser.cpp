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

#include "relm/sql/parser.hpp"

#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "relm/common/error.hpp"

namespace relm::sql {

namespace {

enum class TokenKind {
  End,
  Ident,
  Keyword,
  Int,
  Float,
  String,
  Comma,
  LParen,
  RParen,
  Dot,
  Semicolon,
  Eq,    // = and ==
  Ne,    // !=
  Lt,
  Le,
  Gt,
  Ge,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;     // raw text for idents; uppercased for keywords
  std::string raw;      // original spelling
  int64_t int_value = 0;
  double float_value = 0.0;
  int line = 1;
  int column = 1;
};

const std::unordered_set<std::string> kKeywords = {
    "SELECT", "FROM", "JOIN", "INNER", "ON", "WHERE", "AND", "GROUP",
    "BY", "AS", "AVG", "LLM", "SIMILARITY_SEARCH", "RETURNING", "INT",
    "TEXT", "CHOICE", "BETWEEN", "TRUE", "FALSE", "NULL",
    // Recognized only to produce UnsupportedFeature diagnostics.
    "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "UNION", "ORDER",
    "LIMIT", "HAVING", "OR", "NOT", "DISTINCT", "COUNT", "SUM", "MIN", "MAX"};

const std::unordered_set<std::string> kUnsupported = {
    "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "UNION", "ORDER",
    "LIMIT", "HAVING", "OR", "NOT", "DISTINCT", "COUNT", "SUM", "MIN", "MAX"};

class Lexer {
 public:
  explicit Lexer(const std::string &text) : text_(text) { advance(); }

  const Token &peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string &message, int line, int column) {
    throw EngineError(ErrorCode::Syntax, message, line, column);
  }

  void advance() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) {
      t.kind = TokenKind::End;
      current_ = t;
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        consume();
      }
      t.raw = text_.substr(start, pos_ - start);
      std::string upper;
      for (char ch : t.raw) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
      if (kKeywords.count(upper)) {
        t.kind = TokenKind::Keyword;
        t.text = upper;
      } else {
        t.kind = TokenKind::Ident;
        t.text = t.raw;
      }
      current_ = t;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(t, false);
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(t, c);
      return;
    }
    switch (c) {
      case ',': consume(); t.kind = TokenKind::Comma; break;
      case '(': consume(); t.kind = TokenKind::LParen; break;
      case ')': consume(); t.kind = TokenKind::RParen; break;
      case '.': consume(); t.kind = TokenKind::Dot; break;
      case ';': consume(); t.kind = TokenKind::Semicolon; break;
      case '=':
        consume();
        if (pos_ < text_.size() && text_[pos_] == '=') consume();
        t.kind = TokenKind::Eq;
        break;
      case '!':
        consume();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          consume();
          t.kind = TokenKind::Ne;
        } else {
          fail("unexpected '!'", t.line, t.column);
        }
        break;
      case '<':
        consume();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          consume();
          t.kind = TokenKind::Le;
        } else if (pos_ < text_.size() && text_[pos_] == '>') {
          consume();
          t.kind = TokenKind::Ne;
        } else {
          t.kind = TokenKind::Lt;
        }
        break;
      case '>':
        consume();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          consume();
          t.kind = TokenKind::Ge;
        } else {
          t.kind = TokenKind::Gt;
        }
        break;
      case '-':
        consume();
        if (pos_ < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          lex_number(t, true);
          return;
        }
        fail("unexpected '-'", t.line, t.column);
      default:
        fail(std::string("unexpected character '") + c + "'", t.line, t.column);
    }
    current_ = t;
  }

  void lex_number(Token &t, bool negative) {
    size_t start = pos_;
    bool is_float = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        consume();
      } else if (c == '.' && !is_float && pos_ + 1 < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        is_float = true;
        consume();
      } else {
        break;
      }
    }
    std::string digits = text_.substr(start, pos_ - start);
    if (is_float) {
      t.kind = TokenKind::Float;
      double v = 0;
      std::from_chars(digits.data(), digits.data() + digits.size(), v);
      t.float_value = negative ? -v : v;
    } else {
      t.kind = TokenKind::Int;
      int64_t v = 0;
      std::from_chars(digits.data(), digits.data() + digits.size(), v);
      t.int_value = negative ? -v : v;
    }
    t.raw = (negative ? "-" : "") + digits;
    current_ = t;
  }

  void lex_string(Token &t, char quote) {
    consume();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= text_.size()) {
        fail("unterminated string literal", t.line, t.column);
      }
      char c = text_[pos_];
      if (c == quote) {
        consume();
        if (pos_ < text_.size() && text_[pos_] == quote) {
          value.push_back(quote);  // doubled quote escape
          consume();
          continue;
        }
        break;
      }
      value.push_back(c);
      consume();
    }
    t.kind = TokenKind::String;
    t.text = std::move(value);
    current_ = t;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        consume();
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') consume();
      } else {
        break;
      }
    }
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  const std::string &text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(const std::string &text) : lexer_(text) {}

  QueryAst parse_query() {
    expect_keyword("SELECT");
    QueryAst ast;
    ast.select_items.push_back(parse_select_item());
    while (accept(TokenKind::Comma)) {
      ast.select_items.push_back(parse_select_item());
    }
    expect_keyword("FROM");
    ast.from = parse_table_ref();
    while (is_join_ahead()) {
      ast.joins.push_back(parse_join());
    }
    if (accept_keyword("WHERE")) {
      ast.where_conjuncts.push_back(parse_conjunct());
      while (accept_keyword("AND")) {
        ast.where_conjuncts.push_back(parse_conjunct());
      }
    }
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      ast.group_by.push_back(parse_column_ref());
      while (accept(TokenKind::Comma)) {
        ast.group_by.push_back(parse_column_ref());
      }
    }
    accept(TokenKind::Semicolon);
    const Token &t = lexer_.peek();
    if (t.kind != TokenKind::End) {
      check_unsupported(t);
      fail_at(t, "unexpected trailing input: '" + describe(t) + "'");
    }
    return ast;
  }

 private:
  [[noreturn]] void fail_at(const Token &t, const std::string &message) {
    throw EngineError(ErrorCode::Syntax, message, t.line, t.column);
  }

  [[noreturn]] void unsupported(const Token &t) {
    throw EngineError(ErrorCode::UnsupportedFeature,
                      "unsupported feature at token '" + t.raw + "'", t.line,
                      t.column);
  }

  std::string describe(const Token &t) {
    switch (t.kind) {
      case TokenKind::End: return "<end of input>";
      case TokenKind::String: return "\"" + t.text + "\"";
      default: return t.raw.empty() ? t.text : t.raw;
    }
  }

  void check_unsupported(const Token &t) {
    if (t.kind == TokenKind::Keyword && kUnsupported.count(t.text)) {
      unsupported(t);
    }
  }

  bool accept(TokenKind kind) {
    if (lexer_.peek().kind == kind) {
      lexer_.take();
      return true;
    }
    return false;
  }

  bool peek_keyword(const std::string &kw) {
    const Token &t = lexer_.peek();
    return t.kind == TokenKind::Keyword && t.text == kw;
  }

  bool accept_keyword(const std::string &kw) {
    if (peek_keyword(kw)) {
      lexer_.take();
      return true;
    }
    return false;
  }

  void expect_keyword(const std::string &kw) {
    const Token &t = lexer_.peek();
    check_unsupported(t);
    if (t.kind != TokenKind::Keyword || t.text != kw) {
      fail_at(t, "expected " + kw + ", found '" + describe(t) + "'");
    }
    lexer_.take();
  }

  Token expect(TokenKind kind, const std::string &what) {
    const Token &t = lexer_.peek();
    if (t.kind != kind) {
      check_unsupported(t);
      fail_at(t, "expected " + what + ", found '" + describe(t) + "'");
    }
    return lexer_.take();
  }

  bool is_join_ahead() {
    const Token &t = lexer_.peek();
    if (t.kind != TokenKind::Keyword) return false;
    if (t.text == "JOIN" || t.text == "INNER") return true;
    if (kUnsupported.count(t.text) && t.text != "OR" && t.text != "NOT") {
      // LEFT/RIGHT/FULL/OUTER/CROSS JOIN etc.
      unsupported(t);
    }
    return false;
  }

  JoinClause parse_join() {
    accept_keyword("INNER");
    expect_keyword("JOIN");
    JoinClause join;
    join.table = parse_table_ref();
    expect_keyword("ON");
    join.left = parse_column_ref();
    Token op = lexer_.take();
    if (op.kind != TokenKind::Eq) {
      fail_at(op, "join condition must be an equality");
    }
    join.right = parse_column_ref();
    return join;
  }

  TableRef parse_table_ref() {
    Token name = expect(TokenKind::Ident, "table name");
    TableRef ref;
    ref.table = name.text;
    const Token &next = lexer_.peek();
    if (next.kind == TokenKind::Ident) {
      ref.alias = lexer_.take().text;
    }
    return ref;
  }

  ColumnRef parse_column_ref() {
    Token first = expect(TokenKind::Ident, "column reference");
    ColumnRef ref;
    if (accept(TokenKind::Dot)) {
      Token second = expect(TokenKind::Ident, "column name");
      ref.qualifier = first.text;
      ref.name = second.text;
    } else {
      ref.name = first.text;
    }
    return ref;
  }

  SelectItem parse_select_item() {
    SelectItem item;
    item.expr = parse_expr();
    if (accept_keyword("AS")) {
      Token alias = expect(TokenKind::Ident, "alias");
      item.alias = alias.text;
    }
    return item;
  }

  Expr parse_expr() {
    const Token &t = lexer_.peek();
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "LLM") return Expr::make_llm(parse_llm());
      if (t.text == "AVG") return Expr::make_avg(parse_avg());
      if (t.text == "TRUE" || t.text == "FALSE") {
        Token b = lexer_.take();
        return Expr::make_literal(Value(b.text == "TRUE"));
      }
      if (t.text == "NULL") {
        lexer_.take();
        return Expr::make_literal(Value::null());
      }
      if (t.text == "SELECT") unsupported(t);
      check_unsupported(t);
    }
    if (t.kind == TokenKind::Ident) return Expr::make_column(parse_column_ref());
    if (t.kind == TokenKind::Int) {
      return Expr::make_literal(Value(lexer_.take().int_value));
    }
    if (t.kind == TokenKind::Float) {
      return Expr::make_literal(Value(lexer_.take().float_value));
    }
    if (t.kind == TokenKind::String) {
      return Expr::make_literal(Value(lexer_.take().text));
    }
    if (t.kind == TokenKind::LParen) {
      // Only subqueries would start here; reject explicitly.
      unsupported(t);
    }
    fail_at(t, "expected expression, found '" + describe(t) + "'");
  }

  AvgCall parse_avg() {
    expect_keyword("AVG");
    expect(TokenKind::LParen, "'('");
    AvgCall avg;
    if (peek_keyword("LLM")) {
      avg.llm = parse_llm();
    } else {
      avg.column = parse_column_ref();
    }
    expect(TokenKind::RParen, "')'");
    return avg;
  }

  LlmInvocation parse_llm() {
    Token kw = lexer_.take();  // LLM
    expect(TokenKind::LParen, "'('");
    Token tmpl = expect(TokenKind::String, "prompt template string");
    LlmInvocation inv;
    inv.template_text = tmpl.text;
    try {
      inv.placeholders = extract_placeholders(inv.template_text);
    } catch (const EngineError &e) {
      throw EngineError(ErrorCode::Syntax, e.what(), tmpl.line, tmpl.column);
    }
    while (accept(TokenKind::Comma)) {
      inv.args.push_back(parse_llm_arg());
    }
    expect(TokenKind::RParen, "')'");
    if (accept_keyword("RETURNING")) {
      inv.returning = parse_returning();
    }
    (void)kw;
    return inv;
  }

  LlmArg parse_llm_arg() {
    LlmArg arg;
    if (peek_keyword("SIMILARITY_SEARCH")) {
      lexer_.take();
      expect(TokenKind::LParen, "'('");
      arg.kind = LlmArg::Kind::Similarity;
      arg.similarity.query = parse_column_ref();
      if (accept(TokenKind::Comma)) {
        Token k = expect(TokenKind::Int, "top-k count");
        if (k.int_value <= 0) {
          fail_at(k, "top-k count must be positive");
        }
        arg.similarity.k = k.int_value;
      }
      expect(TokenKind::RParen, "')'");
    } else {
      arg.kind = LlmArg::Kind::Column;
      arg.column = parse_column_ref();
    }
    return arg;
  }

  ReturningClause parse_returning() {
    ReturningClause clause;
    const Token &t = lexer_.peek();
    if (accept_keyword("TEXT")) {
      clause.kind = ReturningClause::Kind::Text;
      return clause;
    }
    if (accept_keyword("INT")) {
      expect_keyword("BETWEEN");
      Token lo = expect(TokenKind::Int, "lower bound");
      expect_keyword("AND");
      Token hi = expect(TokenKind::Int, "upper bound");
      if (lo.int_value > hi.int_value) {
        fail_at(hi, "RETURNING INT BETWEEN with lo > hi");
      }
      clause.kind = ReturningClause::Kind::IntRange;
      clause.lo = lo.int_value;
      clause.hi = hi.int_value;
      return clause;
    }
    if (accept_keyword("CHOICE")) {
      expect(TokenKind::LParen, "'('");
      clause.kind = ReturningClause::Kind::Choice;
      clause.choices.push_back(expect(TokenKind::String, "choice member").text);
      while (accept(TokenKind::Comma)) {
        clause.choices.push_back(expect(TokenKind::String, "choice member").text);
      }
      expect(TokenKind::RParen, "')'");
      return clause;
    }
    fail_at(t, "expected TEXT, INT BETWEEN, or CHOICE after RETURNING");
  }

  Predicate parse_conjunct() {
    const Token &t = lexer_.peek();
    check_unsupported(t);
    if (peek_keyword("LLM")) {
      Predicate pred;
      pred.kind = Predicate::Kind::LlmEquality;
      pred.llm = parse_llm();
      Token op = lexer_.take();
      if (op.kind != TokenKind::Eq) {
        fail_at(op, "LLM predicate must compare with equality");
      }
      Token lit = expect(TokenKind::String, "string literal");
      pred.expected = lit.text;
      return pred;
    }

    Operand lhs = parse_operand();
    const Token &next = lexer_.peek();
    std::optional<CompareOp> op = compare_op(next.kind);
    if (!op) {
      if (!lhs.is_column && lhs.literal.is_bool()) {
        Predicate pred;
        pred.kind = Predicate::Kind::BoolLiteral;
        pred.bool_value = lhs.literal.as_bool();
        return pred;
      }
      check_unsupported(next);
      fail_at(next, "expected comparison operator");
    }
    lexer_.take();
    Predicate pred;
    pred.kind = Predicate::Kind::Comparison;
    pred.lhs = std::move(lhs);
    pred.op = *op;
    pred.rhs = parse_operand();
    if (!pred.lhs.is_column && !pred.rhs.is_column) {
      fail_at(next, "comparison must reference at least one column");
    }
    return pred;
  }

  std::optional<CompareOp> compare_op(TokenKind kind) {
    switch (kind) {
      case TokenKind::Eq: return CompareOp::Eq;
      case TokenKind::Ne: return CompareOp::Ne;
      case TokenKind::Lt: return CompareOp::Lt;
      case TokenKind::Le: return CompareOp::Le;
      case TokenKind::Gt: return CompareOp::Gt;
      case TokenKind::Ge: return CompareOp::Ge;
      default: return std::nullopt;
    }
  }

  Operand parse_operand() {
    const Token &t = lexer_.peek();
    Operand operand;
    if (t.kind == TokenKind::Ident) {
      operand.is_column = true;
      operand.column = parse_column_ref();
      return operand;
    }
    if (t.kind == TokenKind::Int) {
      operand.literal = Value(lexer_.take().int_value);
      return operand;
    }
    if (t.kind == TokenKind::Float) {
      operand.literal = Value(lexer_.take().float_value);
      return operand;
    }
    if (t.kind == TokenKind::String) {
      operand.literal = Value(lexer_.take().text);
      return operand;
    }
    if (t.kind == TokenKind::Keyword && (t.text == "TRUE" || t.text == "FALSE")) {
      operand.literal = Value(lexer_.take().text == "TRUE");
      return operand;
    }
    check_unsupported(t);
    fail_at(t, "expected column or literal, found '" + describe(t) + "'");
  }

  Lexer lexer_;
};

}  // namespace

QueryAst parse(const std::string &sql_text) {
  Parser parser(sql_text);
  return parser.parse_query();
}

}  // namespace relm::sql
