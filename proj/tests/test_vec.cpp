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

#include <algorithm>
#include <deque>
#include <set>

#include "relm/catalog/table.hpp"
#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"
#include "relm/vec/embedder.hpp"
#include "relm/vec/index.hpp"
#include "relm/vec/simd_kernels.hpp"
#include "support.hpp"

using namespace relm;

namespace {

Embedding random_unit(Rng &rng, size_t dim) {
  Embedding v(dim);
  for (auto &x : v) x = static_cast<float>(rng.next_double() * 2.0 - 1.0);
  simd::normalize(v.data(), v.size());
  return v;
}

/// Brute-force oracle: full sort by (similarity desc, id asc).
std::vector<SearchHit> brute_force_top_k(
    const std::vector<std::pair<int64_t, Embedding>> &entries,
    const Embedding &query, size_t k) {
  std::vector<SearchHit> hits;
  for (const auto &[id, v] : entries) {
    float sim = 0;
    for (size_t i = 0; i < v.size(); ++i) sim += v[i] * query[i];
    hits.push_back({id, sim});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit &a, const SearchHit &b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.row_id < b.row_id;
  });
  hits.resize(std::min(k, hits.size()));
  return hits;
}

}  // namespace

TEST_CASE("simd kernels: dispatched variants match the scalar reference") {
  INFO("active kernel: ", simd::active_kernel());
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = static_cast<size_t>(rng.next_int(1, 300));
    std::vector<float> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = static_cast<float>(rng.next_double() * 4.0 - 2.0);
      b[i] = static_cast<float>(rng.next_double() * 4.0 - 2.0);
    }
    float reference = simd::dot_scalar(a.data(), b.data(), n);
    float dispatched = simd::dot(a.data(), b.data(), n);
    CHECK(dispatched ==
          doctest::Approx(reference).epsilon(1e-4).scale(std::abs(reference) + 1));
  }

  SUBCASE("batch_dot agrees with per-row scalar dots") {
    size_t dim = 64, count = 50;
    std::vector<float> base(count * dim), query(dim);
    for (auto &x : base) x = static_cast<float>(rng.next_double() - 0.5);
    for (auto &x : query) x = static_cast<float>(rng.next_double() - 0.5);
    std::vector<float> out(count), expected(count);
    simd::batch_dot(query.data(), base.data(), count, dim, out.data());
    simd::batch_dot_scalar(query.data(), base.data(), count, dim, expected.data());
    for (size_t i = 0; i < count; ++i) {
      CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-4));
    }
  }
}

TEST_CASE("normalize produces unit vectors and handles zero") {
  std::vector<float> v = {3.0f, 4.0f};
  simd::normalize(v.data(), v.size());
  CHECK(simd::l2_norm(v.data(), v.size()) == doctest::Approx(1.0f).epsilon(1e-6));
  std::vector<float> zero = {0.0f, 0.0f, 0.0f};
  simd::normalize(zero.data(), zero.size());
  CHECK(zero[0] == 1.0f);
}

TEST_CASE("mock embedder: deterministic, normalized, discriminative") {
  MockEmbedder embedder(64, 42);
  auto a1 = embedder.embed_one("What is the capital of France?");
  auto a2 = embedder.embed_one("What is the capital of France?");
  CHECK(a1 == a2);
  CHECK(simd::l2_norm(a1.data(), a1.size()) ==
        doctest::Approx(1.0f).epsilon(1e-6));

  auto b = embedder.embed_one("Completely unrelated gardening advice.");
  float cos = simd::dot(a1.data(), b.data(), a1.size());
  CHECK(cos < 1.0f - 1e-3);

  SUBCASE("order-preserving batch with call counting") {
    auto batch = embedder.embed({"one", "two", "three"});
    REQUIRE(batch.size() == 3);
    CHECK(batch[1] == embedder.embed_one("two"));
    CHECK(embedder.call_count() >= 3);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(embedder.embed({}), EngineError);
  }
  SUBCASE("different seeds give different spaces") {
    MockEmbedder other(64, 43);
    CHECK(embedder.embed_one("text") != other.embed_one("text"));
  }
}

TEST_CASE("exact top_k equals the brute-force oracle on random instances") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    size_t dim = 16;
    size_t count = static_cast<size_t>(rng.next_int(1, 200));
    VectorIndex index(dim, IndexStrategy::ExactScan, {}, 1);
    std::vector<std::pair<int64_t, Embedding>> entries;
    for (size_t i = 0; i < count; ++i) {
      Embedding v = random_unit(rng, dim);
      entries.emplace_back(static_cast<int64_t>(i), v);
      index.add(static_cast<int64_t>(i), v);
    }
    index.finalize();
    Embedding query = random_unit(rng, dim);
    size_t k = static_cast<size_t>(rng.next_int(1, 10));
    auto hits = index.top_k(query, k);
    auto expected = brute_force_top_k(entries, query, k);
    REQUIRE(hits.size() == expected.size());
    for (size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].row_id == expected[i].row_id);
      CHECK(hits[i].similarity == doctest::Approx(expected[i].similarity)
                                      .epsilon(1e-4));
    }
  }
}

TEST_CASE("top_k edge cases") {
  VectorIndex index(4, IndexStrategy::ExactScan, {}, 1);
  Embedding e0 = {1, 0, 0, 0}, e1 = {0, 1, 0, 0}, e2 = {0, 0, 1, 0};
  index.add(0, e0);
  index.add(1, e1);
  index.add(2, e2);
  index.finalize();

  SUBCASE("k >= size returns everything, sorted") {
    auto hits = index.top_k(e1, 10);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].row_id == 1);
    CHECK(hits[0].similarity == doctest::Approx(1.0f).epsilon(1e-6));
  }
  SUBCASE("query equal to an indexed vector ranks it first at ~1.0") {
    auto hits = index.top_k(e2, 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].row_id == 2);
    CHECK(hits[0].similarity == doctest::Approx(1.0f).epsilon(1e-6));
  }
  SUBCASE("ties break by ascending row id") {
    // e0 and e2 are both orthogonal to e1.
    auto hits = index.top_k(e1, 3);
    CHECK(hits[1].row_id < hits[2].row_id);
  }
  SUBCASE("dimension mismatch is rejected") {
    Embedding bad = {1, 0};
    CHECK_THROWS_AS(index.top_k(bad, 1), EngineError);
  }
}

TEST_CASE("graph index: recall@3 >= 0.9 against the exact oracle") {
  Rng rng(777);
  const size_t dim = 32, count = 1000, queries = 100, k = 3;
  GraphParams params;  // M=16, ef_construction=200, ef_search=64
  VectorIndex graph(dim, IndexStrategy::GraphIndex, params, 99);
  VectorIndex exact(dim, IndexStrategy::ExactScan, {}, 99);
  for (size_t i = 0; i < count; ++i) {
    Embedding v = random_unit(rng, dim);
    graph.add(static_cast<int64_t>(i), v);
    exact.add(static_cast<int64_t>(i), v);
  }
  graph.finalize();
  exact.finalize();

  size_t found = 0;
  for (size_t q = 0; q < queries; ++q) {
    Embedding query = random_unit(rng, dim);
    auto truth = exact.top_k(query, k);
    auto approx = graph.top_k(query, k);
    std::set<int64_t> truth_ids, approx_ids;
    for (const auto &h : truth) truth_ids.insert(h.row_id);
    for (const auto &h : approx) approx_ids.insert(h.row_id);
    for (int64_t id : truth_ids) found += approx_ids.count(id);
  }
  double recall = static_cast<double>(found) / static_cast<double>(queries * k);
  INFO("recall@3 = ", recall);
  CHECK(recall >= 0.9);
}

TEST_CASE("graph index: every entry is reachable from the entry point") {
  Rng rng(5);
  VectorIndex index(16, IndexStrategy::GraphIndex, {}, 3);
  const size_t count = 300;
  for (size_t i = 0; i < count; ++i) {
    index.add(static_cast<int64_t>(i), random_unit(rng, 16));
  }
  index.finalize();

  const auto &links = index.base_links();
  std::set<int32_t> visited;
  std::deque<int32_t> frontier{index.entry_point()};
  visited.insert(index.entry_point());
  while (!frontier.empty()) {
    int32_t node = frontier.front();
    frontier.pop_front();
    for (int32_t next : links[static_cast<size_t>(node)]) {
      if (visited.insert(next).second) frontier.push_back(next);
    }
  }
  CHECK(visited.size() == count);
}

TEST_CASE("index persistence round-trips and rebuilds deterministically") {
  test::TempDir dir("vidx");
  Rng rng(21);
  GraphParams params;
  VectorIndex original(16, IndexStrategy::GraphIndex, params, 8);
  for (size_t i = 0; i < 200; ++i) {
    original.add(static_cast<int64_t>(i), random_unit(rng, 16));
  }
  original.finalize();
  std::string path = (dir.path / "squad.context.vidx").string();
  original.save(path);

  VectorIndex loaded = VectorIndex::load(path);
  CHECK(loaded.size() == 200);
  CHECK(loaded.dimension() == 16);
  CHECK(loaded.strategy() == IndexStrategy::GraphIndex);
  CHECK(loaded.params().m == params.m);

  // Same seed, same insertion order: searches agree exactly.
  for (int q = 0; q < 20; ++q) {
    Embedding query = random_unit(rng, 16);
    auto a = original.top_k(query, 5);
    auto b = loaded.top_k(query, 5);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].row_id == b[i].row_id);
  }

  SUBCASE("corrupt magic is rejected") {
    std::string bad = (dir.path / "bad.vidx").string();
    test::write_file(bad, "not an index");
    CHECK_THROWS_AS(VectorIndex::load(bad), EngineError);
  }
}

TEST_CASE("build_index embeds a text column; empty tables are rejected") {
  MockEmbedder embedder(32, 7);
  Schema schema({{"context", ColumnType::Text}});
  auto table = std::make_shared<Table>("squad", schema);
  for (int i = 0; i < 100; ++i) {
    table->append_row({Value("Context passage " + std::to_string(i))});
  }
  VectorIndex index =
      build_index(*table, "context", embedder, IndexStrategy::ExactScan, {}, 1);
  CHECK(index.size() == 100);

  // A query equal to an indexed text retrieves that row first.
  auto query = embedder.embed_one("Context passage 42");
  auto hits = index.top_k(query, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].row_id == 42);
  CHECK(hits[0].similarity == doctest::Approx(1.0f).epsilon(1e-6));

  Table empty("empty", schema);
  CHECK_THROWS_AS(
      build_index(empty, "context", embedder, IndexStrategy::ExactScan, {}, 1),
      EngineError);
}

TEST_CASE("exact top_k matches brute force at the ten-thousand-vector scale") {
  Rng rng(888);
  const size_t dim = 16, count = 10'000;
  VectorIndex index(dim, IndexStrategy::ExactScan, {}, 1);
  std::vector<std::pair<int64_t, Embedding>> entries;
  for (size_t i = 0; i < count; ++i) {
    Embedding v = random_unit(rng, dim);
    entries.emplace_back(static_cast<int64_t>(i), v);
    index.add(static_cast<int64_t>(i), v);
  }
  index.finalize();
  for (int q = 0; q < 5; ++q) {
    Embedding query = random_unit(rng, dim);
    auto hits = index.top_k(query, 10);
    auto expected = brute_force_top_k(entries, query, 10);
    REQUIRE(hits.size() == expected.size());
    for (size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].row_id == expected[i].row_id);
    }
  }
}
