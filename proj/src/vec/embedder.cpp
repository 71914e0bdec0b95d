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

#include "relm/vec/embedder.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "relm/common/error.hpp"
#include "relm/common/hash.hpp"
#include "relm/vec/simd_kernels.hpp"

namespace relm {

Embedding MockEmbedder::embed_one(const std::string &text) const {
  Embedding out(dimension_, 0.0f);
  auto scatter = [&](uint64_t h) {
    // Two signed updates per n-gram spread mass across coordinates.
    uint64_t mixed = hash_combine(seed_, h);
    for (int rep = 0; rep < 2; ++rep) {
      mixed = splitmix64(mixed);
      size_t idx = static_cast<size_t>(mixed % dimension_);
      float sign = (mixed >> 32) & 1 ? 1.0f : -1.0f;
      out[idx] += sign;
    }
  };
  if (text.size() < 3) {
    scatter(fnv1a64(text));
  } else {
    for (size_t i = 0; i + 3 <= text.size(); ++i) {
      scatter(fnv1a64(std::string_view(text.data() + i, 3)));
    }
  }
  simd::normalize(out.data(), out.size());
  return out;
}

std::vector<Embedding> MockEmbedder::embed(
    const std::vector<std::string> &texts) {
  if (texts.empty()) {
    throw EngineError(ErrorCode::EmptyTable, "embed() requires at least one text");
  }
  std::vector<Embedding> result;
  result.reserve(texts.size());
  for (const auto &text : texts) {
    result.push_back(embed_one(text));
    calls_.fetch_add(1, std::memory_order_relaxed);
  }
  return result;
}

std::vector<Embedding> HttpEmbedder::embed(
    const std::vector<std::string> &texts) {
  if (texts.empty()) {
    throw EngineError(ErrorCode::EmptyTable, "embed() requires at least one text");
  }
  nlohmann::json body = {{"model", descriptor_.model}, {"input", texts}};
  httplib::Client client(descriptor_.endpoint);
  client.set_read_timeout(descriptor_.timeout_ms / 1000,
                          (descriptor_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!descriptor_.api_key_env.empty()) {
    if (const char *key = std::getenv(descriptor_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto res = client.Post("/v1/embeddings", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw EngineError(ErrorCode::Transport,
                      "cannot reach embedding backend " + descriptor_.endpoint);
  }
  if (res->status < 200 || res->status >= 300) {
    throw EngineError(ErrorCode::BackendRefused,
                      "embedding backend returned HTTP " +
                          std::to_string(res->status) + ": " + res->body);
  }
  nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("data")) {
    throw EngineError(ErrorCode::BackendRefused,
                      "malformed embeddings response");
  }
  std::vector<Embedding> result;
  result.reserve(texts.size());
  for (const auto &entry : doc["data"]) {
    Embedding e = entry.value("embedding", std::vector<float>{});
    if (e.size() != dimension_) {
      throw EngineError(ErrorCode::DimensionMismatch,
                        "backend returned dimension " +
                            std::to_string(e.size()) + ", expected " +
                            std::to_string(dimension_));
    }
    simd::normalize(e.data(), e.size());
    result.push_back(std::move(e));
    calls_.fetch_add(1, std::memory_order_relaxed);
  }
  if (result.size() != texts.size()) {
    throw EngineError(ErrorCode::BackendRefused,
                      "embedding count mismatch: sent " +
                          std::to_string(texts.size()) + ", got " +
                          std::to_string(result.size()));
  }
  return result;
}

}  // namespace relm
