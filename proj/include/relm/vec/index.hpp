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
#include <string>
#include <unordered_set>
#include <vector>

#include "relm/vec/embedder.hpp"

namespace relm {

enum class IndexStrategy : uint8_t { ExactScan = 0, GraphIndex = 1 };

struct GraphParams {
  int m = 16;
  int ef_construction = 200;
  int ef_search = 64;
};

struct SearchHit {
  int64_t row_id = 0;
  float similarity = 0.0f;
};

/// Cosine top-k over L2-normalized vectors (cosine == dot product). Exact
/// scan is the ground truth; the graph strategy is a small-world navigation
/// graph built with seeded, deterministic level draws. Build is exclusive;
/// queries against a finalized index are read-only and thread-safe.
class VectorIndex {
 public:
  VectorIndex(size_t dimension, IndexStrategy strategy, GraphParams params,
              uint64_t seed);

  /// Build phase: row ids must be unique; vectors are normalized on entry.
  void add(int64_t row_id, Embedding embedding);

  /// Finishes construction (builds the graph for GraphIndex).
  void finalize();

  /// Exact strategy returns the true top-k with ties broken by ascending row
  /// id; the graph strategy returns an approximate top-k. Result length is
  /// min(k, size()).
  std::vector<SearchHit> top_k(const Embedding &query, size_t k) const;

  size_t size() const { return ids_.size(); }
  size_t dimension() const { return dimension_; }
  IndexStrategy strategy() const { return strategy_; }
  const GraphParams &params() const { return params_; }

  /// Little-endian binary format documented in docs/formats.md. The graph is
  /// rebuilt deterministically on load from the stored seed.
  void save(const std::string &path) const;
  static VectorIndex load(const std::string &path);

  /// Base-layer adjacency (test hook for the reachability invariant).
  const std::vector<std::vector<int32_t>> &base_links() const {
    return links_level0_;
  }
  int32_t entry_point() const { return entry_point_; }

 private:
  struct Candidate {
    float similarity;
    int32_t node;
  };

  float node_similarity(const Embedding &query, int32_t node) const;
  std::vector<SearchHit> exact_top_k(const Embedding &query, size_t k) const;
  std::vector<SearchHit> graph_top_k(const Embedding &query, size_t k) const;
  void insert_node(int32_t node);
  std::vector<Candidate> search_layer(const Embedding &query, int32_t entry,
                                      size_t ef, int level) const;
  std::vector<int32_t> &links_at(int32_t node, int level);
  const std::vector<int32_t> &links_at(int32_t node, int level) const;

  size_t dimension_;
  IndexStrategy strategy_;
  GraphParams params_;
  uint64_t seed_;
  bool finalized_ = false;

  std::vector<int64_t> ids_;
  std::unordered_set<int64_t> seen_ids_;
  std::vector<float> storage_;  // row-major, size() * dimension_

  // Graph state (GraphIndex only).
  std::vector<int> levels_;
  std::vector<std::vector<int32_t>> links_level0_;
  std::vector<std::vector<std::vector<int32_t>>> links_upper_;  // [node][level-1]
  int32_t entry_point_ = -1;
  int max_level_ = -1;
};

/// Embeds a text column and builds an index over it; row ids are row
/// ordinals. Throws EmptyTable on empty input.
class Table;
VectorIndex build_index(const Table &table, const std::string &column,
                        Embedder &embedder, IndexStrategy strategy,
                        GraphParams params, uint64_t seed);

}  // namespace relm
