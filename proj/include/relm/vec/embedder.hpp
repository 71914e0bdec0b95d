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

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "relm/llm/backend.hpp"

namespace relm {

using Embedding = std::vector<float>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual size_t dimension() const = 0;

  /// One embedding per input text, order preserving. Outputs are
  /// L2-normalized.
  virtual std::vector<Embedding> embed(const std::vector<std::string> &texts) = 0;

  int64_t call_count() const { return calls_.load(); }

 protected:
  std::atomic<int64_t> calls_{0};
};

/// Deterministic desk-scale embedder: hashed character trigrams accumulate
/// signed contributions into seeded pseudo-random coordinates, then the
/// vector is L2-normalized. Pure function of (text, seed, dimension).
class MockEmbedder : public Embedder {
 public:
  MockEmbedder(size_t dimension, uint64_t seed)
      : dimension_(dimension), seed_(seed) {}

  size_t dimension() const override { return dimension_; }
  std::vector<Embedding> embed(const std::vector<std::string> &texts) override;

  Embedding embed_one(const std::string &text) const;

 private:
  size_t dimension_;
  uint64_t seed_;
};

/// OpenAI-compatible `/v1/embeddings` client. Raises DimensionMismatch when
/// the service returns vectors of an unexpected width.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(BackendDescriptor descriptor, size_t dimension)
      : descriptor_(std::move(descriptor)), dimension_(dimension) {}

  size_t dimension() const override { return dimension_; }
  std::vector<Embedding> embed(const std::vector<std::string> &texts) override;

 private:
  BackendDescriptor descriptor_;
  size_t dimension_;
};

}  // namespace relm
