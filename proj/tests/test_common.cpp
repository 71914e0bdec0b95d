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

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"
#include "relm/common/ini.hpp"
#include "relm/common/tokens.hpp"
#include "relm/common/value.hpp"

using namespace relm;

TEST_CASE("value parsing follows declared types") {
  CHECK(parse_value("42", ColumnType::Int64).as_int() == 42);
  CHECK(parse_value("-7", ColumnType::Int64).as_int() == -7);
  CHECK(parse_value("2.5", ColumnType::Float64).as_float() == doctest::Approx(2.5));
  CHECK(parse_value("True", ColumnType::Bool).as_bool());
  CHECK(parse_value("FALSE", ColumnType::Bool).as_bool() == false);
  CHECK(parse_value("hello", ColumnType::Text).as_text() == "hello");
  CHECK(parse_value("", ColumnType::Int64).is_null());
  CHECK_THROWS_AS(parse_value("4x", ColumnType::Int64), EngineError);
  CHECK_THROWS_AS(parse_value("yes", ColumnType::Bool), EngineError);
}

TEST_CASE("float formatting round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 12345.6789, -2.5e-10, 1e300}) {
    Value parsed = parse_value(format_double(v), ColumnType::Float64);
    CHECK(parsed.as_float() == v);
  }
}

TEST_CASE("vector values parse and print") {
  Value v = parse_value("[0.5 -1 2]", ColumnType::Vector);
  REQUIRE(v.is_vector());
  CHECK(v.as_vector().size() == 3);
  CHECK(v.as_vector()[1] == doctest::Approx(-1.0f));
  CHECK(parse_value(v.to_text(), ColumnType::Vector).as_vector() ==
        v.as_vector());
}

TEST_CASE("value hashing separates types and values") {
  CHECK(Value("1").hash() != Value(int64_t{1}).hash());
  CHECK(Value("a").hash() != Value("b").hash());
  CHECK(Value::null().hash() == Value::null().hash());
}

TEST_CASE("rng is deterministic and uniform-ish") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(11);
  for (int i = 0; i < 1000; ++i) {
    double d = r.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    int64_t n = r.next_int(3, 5);
    CHECK(n >= 3);
    CHECK(n <= 5);
  }
}

TEST_CASE("ini parse, query, serialize") {
  std::string text =
      "# comment\n[backend]\nkind = mock\n timeout_ms = 250 \n\n"
      "[scheduler]\nwindow = 16\n";
  IniDoc doc = IniDoc::parse(text);
  CHECK(doc.get_or("backend", "kind", "") == "mock");
  CHECK(doc.get_int("backend", "timeout_ms", 0) == 250);
  CHECK(doc.get_int("scheduler", "window", 0) == 16);
  CHECK(doc.get_int("scheduler", "missing", 9) == 9);
  CHECK_FALSE(doc.get("nope", "kind").has_value());

  IniDoc again = IniDoc::parse(doc.serialize());
  CHECK(again.serialize() == doc.serialize());
}

TEST_CASE("ini rejects malformed lines") {
  CHECK_THROWS_AS(IniDoc::parse("[open\n"), EngineError);
  CHECK_THROWS_AS(IniDoc::parse("keywithoutvalue\n"), EngineError);
}

TEST_CASE("token estimate is chars/4 rounded up") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("abc") == 1);
  CHECK(estimate_tokens("abcd") == 1);
  CHECK(estimate_tokens("abcde") == 2);
  CHECK(estimate_tokens(std::string(200, 'x')) == 50);
}
