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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relm/common/hash.hpp"
#include "relm/sql/binder.hpp"
#include "relm/sql/parser.hpp"
#include "support.hpp"

using namespace relm;
using namespace relm::sql;

namespace {

// The projection query as printed in the reference listing, capitalization
// and line breaks included.
const char *kProjectionListing = R"(SELECT LLM("Recommend movies for the user based on {movie information} and {user review}",
     m.movie_info, r.review_content)
FROM reviews r
JOIN movies m ON r.rotten_tomatoes_link ==
m.rotten_tomatoes_link)";

const char *kMultiLlmListing = R"(SELECT LLM("Recommend movies for the user based on {movie information} and {user review}", m.movie_info, r.review_content) AS recommendations
FROM Movies m
JOIN Reviews r ON r.rotten_tomatoes_link =
m.rotten_tomatoes_link
WHERE LLM("Analyze whether this movie would be suitable for kids based on {movie information} and {user review}", m.movie_info, r.review_content) == "Yes"
AND r.review_type == "Fresh")";

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const EngineError &e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("projection listing parses to one LLM item, one join, no filters") {
  QueryAst ast = parse(kProjectionListing);
  REQUIRE(ast.select_items.size() == 1);
  REQUIRE(ast.select_items[0].expr.kind == Expr::Kind::Llm);
  const LlmInvocation &inv = *ast.select_items[0].expr.llm;
  CHECK(inv.args.size() == 2);
  CHECK(inv.placeholders ==
        std::vector<std::string>{"movie information", "user review"});
  CHECK(ast.joins.size() == 1);
  CHECK(ast.where_conjuncts.empty());
  CHECK(ast.from.table == "reviews");
  CHECK(ast.from.alias == "r");
}

TEST_CASE("minimal query parses") {
  QueryAst ast = parse("SELECT a FROM t");
  REQUIRE(ast.select_items.size() == 1);
  CHECK(ast.select_items[0].expr.kind == Expr::Kind::Column);
  CHECK(ast.joins.empty());
  CHECK(ast.where_conjuncts.empty());
}

TEST_CASE("multi-invocation listing parses with both LLM sites") {
  QueryAst ast = parse(kMultiLlmListing);
  REQUIRE(ast.select_items.size() == 1);
  CHECK(ast.select_items[0].expr.kind == Expr::Kind::Llm);
  CHECK(ast.select_items[0].alias == "recommendations");
  REQUIRE(ast.where_conjuncts.size() == 2);
  CHECK(ast.where_conjuncts[0].kind == Predicate::Kind::LlmEquality);
  CHECK(ast.where_conjuncts[0].expected == "Yes");
  CHECK(ast.where_conjuncts[1].kind == Predicate::Kind::Comparison);
  CHECK(ast.where_conjuncts[1].rhs.literal.as_text() == "Fresh");
}

TEST_CASE("aggregation and RAG listings parse") {
  QueryAst q4 = parse(bench::kQ4);
  REQUIRE(q4.select_items.size() == 1);
  CHECK(q4.select_items[0].expr.kind == Expr::Kind::Avg);
  CHECK(q4.select_items[0].alias == "AverageScore");
  CHECK(q4.group_by.size() == 1);

  QueryAst q5 = parse(bench::kQ5);
  REQUIRE(q5.select_items.size() == 1);
  const LlmInvocation &inv = *q5.select_items[0].expr.llm;
  REQUIRE(inv.args.size() == 2);
  CHECK(inv.args[0].kind == LlmArg::Kind::Similarity);
  CHECK_FALSE(inv.args[0].similarity.k.has_value());
  REQUIRE(q5.where_conjuncts.size() == 1);
  CHECK(q5.where_conjuncts[0].kind == Predicate::Kind::Comparison);
  CHECK(q5.where_conjuncts[0].rhs.literal.as_bool() == false);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse("SELECT a\nFROM t WHERE ???");
    FAIL("expected SyntaxError");
  } catch (const EngineError &e) {
    CHECK(e.code() == ErrorCode::Syntax);
    CHECK(e.line() == 2);
    CHECK(e.column() >= 14);
  }
  CHECK(code_of([] { parse(""); }) == ErrorCode::Syntax);
  CHECK(code_of([] { parse("SELECT a FROM t trailing nonsense („)"); }) ==
        ErrorCode::Syntax);
  CHECK(code_of([] { parse("SELECT 'open FROM t"); }) == ErrorCode::Syntax);
}

TEST_CASE("unsupported features are named") {
  for (const char *q : {
           "SELECT a FROM t LEFT JOIN s ON t.k = s.k",
           "SELECT a FROM t OUTER JOIN s ON t.k = s.k",
           "SELECT a FROM t WHERE a = 1 OR b = 2",
           "SELECT DISTINCT a FROM t",
           "SELECT a FROM t ORDER BY a",
           "SELECT a FROM t LIMIT 5",
           "SELECT (SELECT a FROM s) FROM t",
           "SELECT COUNT(a) FROM t",
       }) {
    CAPTURE(q);
    CHECK(code_of([&] { parse(q); }) == ErrorCode::UnsupportedFeature);
  }
}

TEST_CASE("equality spellings and quote styles are interchangeable") {
  QueryAst a = parse("SELECT a FROM t WHERE a == \"x\"");
  QueryAst b = parse("SELECT a FROM t WHERE a = 'x'");
  CHECK(print(a) == print(b));
}

TEST_CASE("RETURNING clauses parse") {
  QueryAst q = parse(
      "SELECT LLM(\"Rate {r}\", t.r) RETURNING INT BETWEEN 1 AND 10 FROM t");
  CHECK(q.select_items[0].expr.llm->returning.kind ==
        ReturningClause::Kind::IntRange);
  CHECK(q.select_items[0].expr.llm->returning.hi == 10);

  QueryAst c = parse(
      "SELECT LLM(\"Label {r}\", t.r) RETURNING CHOICE('a', 'b') FROM t");
  CHECK(c.select_items[0].expr.llm->returning.choices ==
        std::vector<std::string>{"a", "b"});

  CHECK(code_of([] {
          parse("SELECT LLM(\"Rate {r}\", t.r) RETURNING INT BETWEEN 5 AND 1 "
                "FROM t");
        }) == ErrorCode::Syntax);
}

TEST_CASE("unbalanced template braces are rejected at parse time") {
  CHECK(code_of([] { parse("SELECT LLM(\"broken {x\", t.a) FROM t"); }) ==
        ErrorCode::Syntax);
  CHECK(code_of([] { parse("SELECT LLM(\"broken x}\", t.a) FROM t"); }) ==
        ErrorCode::Syntax);
}

TEST_CASE("print-parse is a fixed point over the benchmark corpus") {
  for (const auto &name : bench::all_query_names()) {
    CAPTURE(name);
    QueryAst first = parse(bench::query_by_name(name));
    std::string printed = print(first);
    QueryAst second = parse(printed);
    CHECK(print(second) == printed);
  }
}

TEST_CASE("print-parse fixed point holds on randomized grammar queries") {
  Rng rng(515);
  const char *columns[] = {"r.review_content", "r.review_type", "m.movie_title",
                           "m.movie_info", "r.review_score"};
  for (int trial = 0; trial < 300; ++trial) {
    QueryAst ast;
    int items = static_cast<int>(rng.next_int(1, 3));
    for (int i = 0; i < items; ++i) {
      SelectItem item;
      if (rng.next_double() < 0.4) {
        LlmInvocation inv;
        inv.template_text = "Does {a} relate to {b}?";
        inv.placeholders = {"a", "b"};
        for (int a = 0; a < 2; ++a) {
          LlmArg arg;
          std::string col = columns[rng.next_int(0, 4)];
          auto dot = col.find('.');
          arg.column.qualifier = col.substr(0, dot);
          arg.column.name = col.substr(dot + 1);
          inv.args.push_back(arg);
        }
        if (rng.next_double() < 0.3) {
          inv.returning.kind = ReturningClause::Kind::IntRange;
          inv.returning.lo = 0;
          inv.returning.hi = rng.next_int(1, 9);
        }
        item.expr = Expr::make_llm(std::move(inv));
      } else {
        ColumnRef ref;
        std::string col = columns[rng.next_int(0, 4)];
        auto dot = col.find('.');
        ref.qualifier = col.substr(0, dot);
        ref.name = col.substr(dot + 1);
        item.expr = Expr::make_column(ref);
      }
      if (rng.next_double() < 0.3) {
        item.alias = "alias_" + std::to_string(i);
      }
      ast.select_items.push_back(std::move(item));
    }
    ast.from = {"reviews", "r"};
    if (rng.next_double() < 0.7) {
      JoinClause join;
      join.table = {"movies", "m"};
      join.left.qualifier = "r";
      join.left.name = "rotten_tomatoes_link";
      join.right.qualifier = "m";
      join.right.name = "rotten_tomatoes_link";
      ast.joins.push_back(join);
    }
    int conjuncts = static_cast<int>(rng.next_int(0, 2));
    for (int c = 0; c < conjuncts; ++c) {
      Predicate pred;
      double pick = rng.next_double();
      if (pick < 0.3) {
        pred.kind = Predicate::Kind::BoolLiteral;
        pred.bool_value = rng.next_int(0, 1) == 1;
      } else {
        pred.kind = Predicate::Kind::Comparison;
        pred.lhs.is_column = true;
        pred.lhs.column.qualifier = "r";
        pred.lhs.column.name = "review_type";
        pred.op = rng.next_int(0, 1) == 0 ? CompareOp::Eq : CompareOp::Ne;
        pred.rhs.literal = Value(std::string("Fresh \"quoted\""));
      }
      ast.where_conjuncts.push_back(std::move(pred));
    }
    std::string printed = print(ast);
    CAPTURE(printed);
    QueryAst reparsed = parse(printed);
    CHECK(print(reparsed) == printed);
  }
}

TEST_CASE("binding resolves figure-1 arguments against the catalog") {
  auto engine = test::fixture_engine(20);
  QueryAst ast = parse(kProjectionListing);
  BoundQuery bound = bind(ast, engine->catalog());
  const LlmInvocation &inv = *bound.ast.select_items[0].expr.llm;
  REQUIRE(inv.args.size() == 2);
  // args resolve to (movies.movie_info, reviews.review_content)
  CHECK(bound.tables[inv.args[0].column.table_index].name == "movies");
  CHECK(bound.tables[inv.args[0].column.table_index]
            .table->schema().column(inv.args[0].column.column_index).name ==
        "movie_info");
  CHECK(bound.tables[inv.args[1].column.table_index].name == "reviews");
  CHECK(inv.contract_set);
  CHECK(inv.site == LlmSite::SelectProjection);
}

TEST_CASE("binder rejects arity mismatches and unknown names") {
  auto engine = test::fixture_engine(10);
  auto bind_q = [&](const std::string &q) {
    return bind(parse(q), engine->catalog());
  };
  CHECK(code_of([&] {
          bind_q("SELECT LLM(\"{a} and {b}\", r.review_content) FROM reviews r");
        }) == ErrorCode::PlaceholderArityMismatch);
  CHECK(code_of([&] { bind_q("SELECT a FROM nonexistent"); }) ==
        ErrorCode::UnknownTable);
  CHECK(code_of([&] { bind_q("SELECT bogus FROM reviews"); }) ==
        ErrorCode::UnknownColumn);
  CHECK(code_of([&] {
          // rotten_tomatoes_link exists in both tables
          bind_q("SELECT rotten_tomatoes_link FROM reviews r JOIN movies m ON "
                 "r.rotten_tomatoes_link = m.rotten_tomatoes_link");
        }) == ErrorCode::AmbiguousColumn);
}

TEST_CASE("unqualified names resolve when unique") {
  auto engine = test::fixture_engine(10);
  BoundQuery bound = bind(
      parse("SELECT review_content FROM reviews r JOIN movies m ON "
            "r.rotten_tomatoes_link = m.rotten_tomatoes_link"),
      engine->catalog());
  const ColumnRef &ref = bound.ast.select_items[0].expr.column;
  CHECK(bound.tables[ref.table_index].name == "reviews");
}

TEST_CASE("contract inference follows syntactic context") {
  ContractDefaults defaults;

  LlmInvocation inv;
  inv.template_text = "Is {x} ok?";
  inv.placeholders = {"x"};
  inv.args.resize(1);

  SUBCASE("equality to Yes gives the Yes/No choice set") {
    OutputContract c =
        infer_contract(inv, {LlmSite::WherePredicate, "Yes"}, defaults);
    CHECK(c.kind == ContractKind::Choice);
    CHECK(c.choices == std::vector<std::string>{"Yes", "No"});
  }
  SUBCASE("equality to another literal appends the configured complement") {
    OutputContract c =
        infer_contract(inv, {LlmSite::WherePredicate, "Positive"}, defaults);
    CHECK(c.choices == std::vector<std::string>{"Positive", "No"});
  }
  SUBCASE("aggregation defaults to the 0..5 range") {
    OutputContract c =
        infer_contract(inv, {LlmSite::AggregateInput, ""}, defaults);
    CHECK(c.kind == ContractKind::IntRange);
    CHECK(c.lo == 0);
    CHECK(c.hi == 5);
  }
  SUBCASE("RETURNING overrides the aggregate range") {
    inv.returning.kind = ReturningClause::Kind::IntRange;
    inv.returning.lo = 1;
    inv.returning.hi = 4;
    OutputContract c =
        infer_contract(inv, {LlmSite::AggregateInput, ""}, defaults);
    CHECK(c.lo == 1);
    CHECK(c.hi == 4);
  }
  SUBCASE("projection defaults to free text") {
    OutputContract c =
        infer_contract(inv, {LlmSite::SelectProjection, ""}, defaults);
    CHECK(c.kind == ContractKind::FreeText);
  }
  SUBCASE("text contract inside AVG is a conflict") {
    inv.returning.kind = ReturningClause::Kind::Text;
    CHECK_THROWS_AS(infer_contract(inv, {LlmSite::AggregateInput, ""}, defaults),
                    EngineError);
  }
  SUBCASE("choice set missing the compared literal is a conflict") {
    inv.returning.kind = ReturningClause::Kind::Choice;
    inv.returning.choices = {"A", "B"};
    CHECK_THROWS_AS(infer_contract(inv, {LlmSite::WherePredicate, "C"}, defaults),
                    EngineError);
  }
  SUBCASE("inference is deterministic") {
    OutputContract a =
        infer_contract(inv, {LlmSite::WherePredicate, "Yes"}, defaults);
    OutputContract b =
        infer_contract(inv, {LlmSite::WherePredicate, "Yes"}, defaults);
    CHECK(a == b);
  }
}

TEST_CASE("every invocation in a bound corpus query has a contract") {
  auto engine = test::fixture_engine(10);
  engine->catalog();  // fixtures installed
  for (const auto &name : bench::all_query_names()) {
    if (name == "q5") continue;  // needs an index to prepare; bind suffices
    BoundQuery bound =
        bind(parse(bench::query_by_name(name)), engine->catalog());
    std::function<void(const LlmInvocation &)> check_inv =
        [&](const LlmInvocation &inv) {
          CHECK(inv.contract_set);
        };
    for (const auto &item : bound.ast.select_items) {
      if (item.expr.kind == Expr::Kind::Llm) check_inv(*item.expr.llm);
      if (item.expr.kind == Expr::Kind::Avg && item.expr.avg->llm) {
        check_inv(*item.expr.avg->llm);
      }
    }
    for (const auto &pred : bound.ast.where_conjuncts) {
      if (pred.kind == Predicate::Kind::LlmEquality) check_inv(*pred.llm);
    }
  }
}

TEST_CASE("similarity search binds as RAG and checks the query column") {
  auto engine = test::fixture_engine(10);
  BoundQuery bound = bind(parse(bench::kQ5), engine->catalog());
  CHECK(bound.has_rag);
  const LlmInvocation &inv = *bound.ast.select_items[0].expr.llm;
  CHECK(inv.site == LlmSite::RagGeneration);
  CHECK(inv.contract.kind == ContractKind::FreeText);
}
