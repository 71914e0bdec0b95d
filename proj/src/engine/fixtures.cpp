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

#include "relm/engine/fixtures.hpp"

#include "relm/common/hash.hpp"

namespace relm::bench {

namespace {

const char *kNouns[] = {"heist",  "romance", "voyage",   "duel",
                        "mystery", "uprising", "festival", "expedition"};
const char *kAdjectives[] = {"quiet",   "frantic", "lavish",  "gritty",
                             "playful", "somber",  "radiant", "peculiar"};
const char *kRatings[] = {"G", "PG", "PG-13", "R"};

std::string sentence(Rng &rng, const char *head, int64_t i) {
  std::string out = head;
  out += " " + std::to_string(i) + ": a ";
  out += kAdjectives[rng.next_int(0, 7)];
  out += " ";
  out += kNouns[rng.next_int(0, 7)];
  out += " involving a ";
  out += kAdjectives[rng.next_int(0, 7)];
  out += " ";
  out += kNouns[rng.next_int(0, 7)];
  out += ".";
  return out;
}

int64_t movie_count(const FixtureSpec &spec) {
  if (spec.movies > 0) return spec.movies;
  return std::max<int64_t>(1, spec.reviews / 10);
}

}  // namespace

std::shared_ptr<const Table> make_movies(const FixtureSpec &spec) {
  Schema schema({{"rotten_tomatoes_link", ColumnType::Text},
                 {"movie_title", ColumnType::Text},
                 {"movie_info", ColumnType::Text},
                 {"content_rating", ColumnType::Text}});
  auto table = std::make_shared<Table>("movies", schema);
  Rng rng(hash_combine(spec.seed, 0x6d6f76ULL));
  int64_t n = movie_count(spec);
  for (int64_t i = 0; i < n; ++i) {
    table->append_row({Value("m" + std::to_string(i)),
                       Value("Movie " + std::to_string(i)),
                       Value(sentence(rng, "Synopsis", i)),
                       Value(std::string(kRatings[i % 4]))});
  }
  return table;
}

std::shared_ptr<const Table> make_reviews(const FixtureSpec &spec) {
  Schema schema({{"rotten_tomatoes_link", ColumnType::Text},
                 {"review_content", ColumnType::Text},
                 {"review_type", ColumnType::Text},
                 {"review_score", ColumnType::Int64}});
  auto table = std::make_shared<Table>("reviews", schema);
  Rng rng(hash_combine(spec.seed, 0x726576ULL));
  int64_t movies = movie_count(spec);
  for (int64_t i = 0; i < spec.reviews; ++i) {
    // Alternating verdicts keep the Fresh fraction at exactly one half for
    // even row counts.
    table->append_row({Value("m" + std::to_string(i % movies)),
                       Value(sentence(rng, "Review", i)),
                       Value(std::string(i % 2 == 0 ? "Fresh" : "Rotten")),
                       Value(i % 6)});
  }
  return table;
}

std::shared_ptr<const Table> make_squad(const FixtureSpec &spec) {
  Schema schema({{"question", ColumnType::Text},
                 {"context", ColumnType::Text},
                 {"is_impossible", ColumnType::Bool},
                 {"title", ColumnType::Text}});
  auto table = std::make_shared<Table>("squad", schema);
  Rng rng(hash_combine(spec.seed, 0x737175ULL));
  int64_t n = spec.squad > 0 ? spec.squad : spec.reviews;
  for (int64_t i = 0; i < n; ++i) {
    table->append_row({Value(sentence(rng, "Question", i)),
                       Value(sentence(rng, "Context", i)),
                       Value(i % 2 == 1),
                       Value("topic" + std::to_string(i % 20))});
  }
  return table;
}

void install_fixtures(Catalog &catalog, const FixtureSpec &spec) {
  catalog.register_table(make_movies(spec));
  catalog.register_table(make_reviews(spec));
  catalog.register_table(make_squad(spec));
}

}  // namespace relm::bench
