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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "relm/common/hash.hpp"
#include "relm/engine/bench.hpp"
#include "relm/engine/engine.hpp"
#include "relm/engine/fixtures.hpp"
#include "relm/engine/queries.hpp"

namespace relm::test {

inline EngineConfig default_config() {
  EngineConfig config = EngineConfig::from_ini(IniDoc::parse(""));
  // Isolated catalog directory per engine: persisted indexes must never
  // leak between tests.
  static std::atomic<uint64_t> counter{0};
  config.catalog_dir =
      (std::filesystem::temp_directory_path() /
       ("relm_test_catalog_" + std::to_string(::getpid()) + "_" +
        std::to_string(counter.fetch_add(1))))
          .string();
  return config;
}

/// Engine over in-memory fixtures (no catalog directory involved).
inline std::unique_ptr<Engine> fixture_engine(int64_t reviews = 100,
                                              EngineConfig config = default_config()) {
  auto engine = std::make_unique<Engine>(config);
  bench::FixtureSpec spec;
  spec.reviews = reviews;
  spec.seed = config.seed;
  bench::install_fixtures(engine->catalog(), spec);
  return engine;
}

/// Temporary directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string &tag) {
    path = std::filesystem::temp_directory_path() /
           ("relm_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

/// Result rows as a sorted multiset of printable tuples, for order-blind
/// comparison of query outputs.
inline std::vector<std::string> row_multiset(const Table &table) {
  std::vector<std::string> rows;
  rows.reserve(table.row_count());
  for (const auto &row : table.rows()) {
    std::string line;
    for (const auto &v : row) {
      line += v.is_null() ? "\x01NULL" : v.to_text();
      line += '\x1f';
    }
    rows.push_back(std::move(line));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

/// Independent replay of the documented Faithful mock mapping, used as the
/// per-row oracle for executor results.
inline std::string mock_faithful_choice(const std::string &prompt,
                                        const std::vector<std::string> &choices) {
  uint64_t h = fnv1a64(prompt);
  return choices[h % choices.size()];
}

inline int64_t mock_faithful_score(const std::string &prompt, int64_t lo,
                                   int64_t hi) {
  uint64_t h = fnv1a64(prompt);
  return lo + static_cast<int64_t>(h % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace relm::test
