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

#include "relm/vec/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <queue>
#include <unordered_set>

#include "relm/catalog/table.hpp"
#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"
#include "relm/vec/simd_kernels.hpp"

namespace relm {

namespace {

constexpr uint64_t kIndexMagic = 0x5844495634434556ULL;  // "VEC4VIDX"
constexpr uint32_t kIndexVersion = 1;

template <typename T>
void write_le(std::ostream &out, T value) {
  unsigned char buf[sizeof(T)];
  for (size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>(
        (static_cast<uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char *>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream &in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char *>(buf), sizeof(T));
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

void write_f32_le(std::ostream &out, float value) {
  uint32_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  write_le<uint32_t>(out, bits);
}

float read_f32_le(std::istream &in) {
  uint32_t bits = read_le<uint32_t>(in);
  float value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

}  // namespace

VectorIndex::VectorIndex(size_t dimension, IndexStrategy strategy,
                         GraphParams params, uint64_t seed)
    : dimension_(dimension), strategy_(strategy), params_(params), seed_(seed) {
  if (dimension_ == 0) {
    throw EngineError(ErrorCode::DimensionMismatch,
                      "index dimension must be positive");
  }
}

void VectorIndex::add(int64_t row_id, Embedding embedding) {
  if (finalized_) {
    throw EngineError(ErrorCode::Internal, "index is finalized");
  }
  if (embedding.size() != dimension_) {
    throw EngineError(ErrorCode::DimensionMismatch,
                      "embedding dimension " + std::to_string(embedding.size()) +
                          " does not match index dimension " +
                          std::to_string(dimension_));
  }
  if (!seen_ids_.insert(row_id).second) {
    throw EngineError(ErrorCode::Internal,
                      "duplicate row id " + std::to_string(row_id));
  }
  simd::normalize(embedding.data(), embedding.size());
  ids_.push_back(row_id);
  storage_.insert(storage_.end(), embedding.begin(), embedding.end());
}

float VectorIndex::node_similarity(const Embedding &query, int32_t node) const {
  return simd::dot(query.data(), storage_.data() + static_cast<size_t>(node) * dimension_,
                   dimension_);
}

void VectorIndex::finalize() {
  if (finalized_) return;
  finalized_ = true;
  if (strategy_ != IndexStrategy::GraphIndex) return;

  const size_t n = ids_.size();
  levels_.assign(n, 0);
  links_level0_.assign(n, {});
  links_upper_.assign(n, {});

  // Geometric level distribution with mL = 1 / ln(M); seeded and therefore
  // reproducible across rebuilds.
  const double ml = 1.0 / std::log(static_cast<double>(params_.m));
  Rng rng(hash_combine(seed_, 0x686e7377ULL));
  for (size_t i = 0; i < n; ++i) {
    double u = rng.next_double();
    if (u <= 0.0) u = 1e-12;
    levels_[i] = static_cast<int>(-std::log(u) * ml);
    links_upper_[i].assign(static_cast<size_t>(levels_[i]), {});
  }

  entry_point_ = -1;
  max_level_ = -1;
  for (size_t i = 0; i < n; ++i) {
    insert_node(static_cast<int32_t>(i));
  }
}

std::vector<int32_t> &VectorIndex::links_at(int32_t node, int level) {
  return level == 0 ? links_level0_[node]
                    : links_upper_[node][static_cast<size_t>(level) - 1];
}

const std::vector<int32_t> &VectorIndex::links_at(int32_t node,
                                                  int level) const {
  return level == 0 ? links_level0_[node]
                    : links_upper_[node][static_cast<size_t>(level) - 1];
}

std::vector<VectorIndex::Candidate> VectorIndex::search_layer(
    const Embedding &query, int32_t entry, size_t ef, int level) const {
  auto better = [](const Candidate &a, const Candidate &b) {
    // Higher similarity first; ties by lower node for determinism.
    return a.similarity != b.similarity ? a.similarity > b.similarity
                                        : a.node < b.node;
  };

  std::unordered_set<int32_t> visited{entry};
  Candidate start{node_similarity(query, entry), entry};

  // Frontier ordered best-first, result set keeps the ef best seen.
  auto frontier_cmp = [&](const Candidate &a, const Candidate &b) {
    return better(b, a);
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(frontier_cmp)>
      frontier(frontier_cmp);
  frontier.push(start);
  std::vector<Candidate> results{start};

  auto worst_result = [&]() {
    return *std::max_element(results.begin(), results.end(),
                             [&](const Candidate &a, const Candidate &b) {
                               return better(a, b);
                             });
  };

  while (!frontier.empty()) {
    Candidate current = frontier.top();
    frontier.pop();
    if (results.size() >= ef && better(worst_result(), current)) break;
    for (int32_t neighbor : links_at(current.node, level)) {
      if (!visited.insert(neighbor).second) continue;
      Candidate candidate{node_similarity(query, neighbor), neighbor};
      if (results.size() < ef || better(candidate, worst_result())) {
        frontier.push(candidate);
        results.push_back(candidate);
        if (results.size() > ef) {
          auto worst = std::max_element(results.begin(), results.end(),
                                        [&](const Candidate &a,
                                            const Candidate &b) {
                                          return better(a, b);
                                        });
          results.erase(worst);
        }
      }
    }
  }
  std::sort(results.begin(), results.end(), better);
  return results;
}

void VectorIndex::insert_node(int32_t node) {
  const int node_level = levels_[node];
  if (entry_point_ < 0) {
    entry_point_ = node;
    max_level_ = node_level;
    return;
  }

  Embedding query(storage_.begin() + static_cast<size_t>(node) * dimension_,
                  storage_.begin() + (static_cast<size_t>(node) + 1) * dimension_);
  int32_t entry = entry_point_;

  // Greedy descent through levels above the node's level.
  for (int level = max_level_; level > node_level; --level) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int32_t neighbor : links_at(entry, level)) {
        if (node_similarity(query, neighbor) > node_similarity(query, entry)) {
          entry = neighbor;
          improved = true;
        }
      }
    }
  }

  for (int level = std::min(max_level_, node_level); level >= 0; --level) {
    auto candidates = search_layer(
        query, entry, static_cast<size_t>(params_.ef_construction), level);
    const size_t max_links = level == 0 ? static_cast<size_t>(2 * params_.m)
                                        : static_cast<size_t>(params_.m);
    size_t take = std::min(candidates.size(), static_cast<size_t>(params_.m));
    for (size_t i = 0; i < take; ++i) {
      int32_t neighbor = candidates[i].node;
      if (neighbor == node) continue;
      links_at(node, level).push_back(neighbor);
      auto &back = links_at(neighbor, level);
      back.push_back(node);
      if (back.size() > max_links) {
        // Keep the closest neighbors of `neighbor`.
        Embedding pivot(
            storage_.begin() + static_cast<size_t>(neighbor) * dimension_,
            storage_.begin() + (static_cast<size_t>(neighbor) + 1) * dimension_);
        std::sort(back.begin(), back.end(), [&](int32_t a, int32_t b) {
          float sa = node_similarity(pivot, a);
          float sb = node_similarity(pivot, b);
          return sa != sb ? sa > sb : a < b;
        });
        back.resize(max_links);
      }
    }
    if (!candidates.empty()) entry = candidates[0].node;
  }

  if (node_level > max_level_) {
    max_level_ = node_level;
    entry_point_ = node;
  }
}

std::vector<SearchHit> VectorIndex::exact_top_k(const Embedding &query,
                                                size_t k) const {
  const size_t n = ids_.size();
  std::vector<float> similarities(n);
  simd::batch_dot(query.data(), storage_.data(), n, dimension_,
                  similarities.data());
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  size_t take = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](size_t a, size_t b) {
                      if (similarities[a] != similarities[b]) {
                        return similarities[a] > similarities[b];
                      }
                      return ids_[a] < ids_[b];
                    });
  std::vector<SearchHit> hits;
  hits.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    hits.push_back({ids_[order[i]], similarities[order[i]]});
  }
  return hits;
}

std::vector<SearchHit> VectorIndex::graph_top_k(const Embedding &query,
                                                size_t k) const {
  int32_t entry = entry_point_;
  for (int level = max_level_; level > 0; --level) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int32_t neighbor : links_at(entry, level)) {
        if (node_similarity(query, neighbor) > node_similarity(query, entry)) {
          entry = neighbor;
          improved = true;
        }
      }
    }
  }
  size_t ef = std::max(static_cast<size_t>(params_.ef_search), k);
  auto candidates = search_layer(query, entry, ef, 0);
  std::vector<SearchHit> hits;
  size_t take = std::min(k, candidates.size());
  hits.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    hits.push_back({ids_[candidates[i].node], candidates[i].similarity});
  }
  return hits;
}

std::vector<SearchHit> VectorIndex::top_k(const Embedding &query,
                                          size_t k) const {
  if (query.size() != dimension_) {
    throw EngineError(ErrorCode::DimensionMismatch,
                      "query dimension " + std::to_string(query.size()) +
                          " does not match index dimension " +
                          std::to_string(dimension_));
  }
  if (ids_.empty() || k == 0) return {};
  if (strategy_ == IndexStrategy::GraphIndex && finalized_ && entry_point_ >= 0) {
    return graph_top_k(query, k);
  }
  return exact_top_k(query, k);
}

void VectorIndex::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw EngineError(ErrorCode::FileNotFound, "cannot write index: " + path);
  }
  write_le<uint64_t>(out, kIndexMagic);
  write_le<uint32_t>(out, kIndexVersion);
  write_le<uint32_t>(out, static_cast<uint32_t>(dimension_));
  write_le<uint64_t>(out, ids_.size());
  write_le<uint8_t>(out, static_cast<uint8_t>(strategy_));
  write_le<uint32_t>(out, static_cast<uint32_t>(params_.m));
  write_le<uint32_t>(out, static_cast<uint32_t>(params_.ef_construction));
  write_le<uint32_t>(out, static_cast<uint32_t>(params_.ef_search));
  write_le<uint64_t>(out, seed_);
  for (size_t i = 0; i < ids_.size(); ++i) {
    write_le<int64_t>(out, ids_[i]);
    for (size_t d = 0; d < dimension_; ++d) {
      write_f32_le(out, storage_[i * dimension_ + d]);
    }
  }
}

VectorIndex VectorIndex::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EngineError(ErrorCode::FileNotFound, "cannot open index: " + path);
  }
  if (read_le<uint64_t>(in) != kIndexMagic) {
    throw EngineError(ErrorCode::Config, "not an index file: " + path);
  }
  uint32_t version = read_le<uint32_t>(in);
  if (version != kIndexVersion) {
    throw EngineError(ErrorCode::Config,
                      "unsupported index version " + std::to_string(version));
  }
  uint32_t dimension = read_le<uint32_t>(in);
  uint64_t count = read_le<uint64_t>(in);
  IndexStrategy strategy = static_cast<IndexStrategy>(read_le<uint8_t>(in));
  GraphParams params;
  params.m = static_cast<int>(read_le<uint32_t>(in));
  params.ef_construction = static_cast<int>(read_le<uint32_t>(in));
  params.ef_search = static_cast<int>(read_le<uint32_t>(in));
  uint64_t seed = read_le<uint64_t>(in);

  VectorIndex index(dimension, strategy, params, seed);
  for (uint64_t i = 0; i < count; ++i) {
    int64_t row_id = read_le<int64_t>(in);
    Embedding embedding(dimension);
    for (uint32_t d = 0; d < dimension; ++d) embedding[d] = read_f32_le(in);
    index.add(row_id, std::move(embedding));
  }
  if (!in) {
    throw EngineError(ErrorCode::Config, "truncated index file: " + path);
  }
  index.finalize();
  return index;
}

VectorIndex build_index(const Table &table, const std::string &column,
                        Embedder &embedder, IndexStrategy strategy,
                        GraphParams params, uint64_t seed) {
  if (table.row_count() == 0) {
    throw EngineError(ErrorCode::EmptyTable,
                      "cannot build an index over empty table " + table.name());
  }
  auto col = table.schema().index_of(column);
  if (!col) {
    throw EngineError(ErrorCode::UnknownColumn,
                      "unknown column: " + table.name() + "." + column);
  }
  std::vector<std::string> texts;
  texts.reserve(table.row_count());
  for (const auto &row : table.rows()) {
    texts.push_back(row[*col].is_null() ? "" : row[*col].to_text());
  }
  auto embeddings = embedder.embed(texts);
  VectorIndex index(embedder.dimension(), strategy, params, seed);
  for (size_t i = 0; i < embeddings.size(); ++i) {
    index.add(static_cast<int64_t>(i), std::move(embeddings[i]));
  }
  index.finalize();
  return index;
}

}  // namespace relm
