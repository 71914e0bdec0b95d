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

#include <cstdint>
#include <memory>

#include "relm/catalog/catalog.hpp"

namespace relm::bench {

/// Seeded synthetic stand-ins mirroring the benchmark datasets' shapes:
/// movies/reviews share a join key, reviews are exactly half "Fresh" (even
/// row counts), and squad rows alternate the is_impossible flag. The
/// generation seed is part of the engine config and documented in the
/// README.
struct FixtureSpec {
  int64_t reviews = 1000;
  int64_t movies = 0;  // 0 = max(1, reviews / 10)
  int64_t squad = 0;   // 0 = reviews
  uint64_t seed = 42;
};

std::shared_ptr<const Table> make_movies(const FixtureSpec &spec);
std::shared_ptr<const Table> make_reviews(const FixtureSpec &spec);
std::shared_ptr<const Table> make_squad(const FixtureSpec &spec);

/// Registers all three tables.
void install_fixtures(Catalog &catalog, const FixtureSpec &spec);

}  // namespace relm::bench
