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
#include <mutex>
#include <optional>
#include <unordered_map>

#include "relm/llm/validate.hpp"

namespace relm {

/// Per-query memoization of validated LLM results, keyed by the combined
/// hash of (invocation template, rendered argument tuple). A key, once
/// written, is never overwritten within the query; only successfully
/// validated values are stored. Safe under concurrent completion callbacks.
class DedupCache {
 public:
  std::optional<TypedValue> lookup(uint64_t key) {
    std::lock_guard lock(mutex_);
    ++lookups_;
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    return it->second;
  }

  void insert(uint64_t key, TypedValue value) {
    std::lock_guard lock(mutex_);
    entries_.emplace(key, std::move(value));  // first write wins
  }

  int64_t hits() const { std::lock_guard lock(mutex_); return hits_; }
  int64_t misses() const { std::lock_guard lock(mutex_); return misses_; }
  int64_t lookups() const { std::lock_guard lock(mutex_); return lookups_; }

 private:
  mutable std::mutex mutex_;
  std::unordered_map<uint64_t, TypedValue> entries_;
  int64_t hits_ = 0;
  int64_t misses_ = 0;
  int64_t lookups_ = 0;
};

/// Dedup key for one rendered call. 0 is reserved for "not deduplicable".
uint64_t dedup_key(uint64_t template_hash, uint64_t arg_tuple_hash);

}  // namespace relm
