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
#include <cstdint>
#include <vector>

#include "relm/common/value.hpp"

namespace relm::exec {

// Rows flow through the pipeline in the wide layout (all bound tables'
// columns followed by computed slots).
using WideRow = std::vector<Value>;
using Rows = std::vector<WideRow>;

/// A batch of consecutive rows (default 128) processed as one unit by the
/// relational operators. Origin ordinals are first_ordinal + offset and
/// strictly increasing within the morsel.
struct Morsel {
  Rows *rows = nullptr;
  size_t begin = 0;
  size_t end = 0;
  int64_t first_ordinal = 0;

  size_t size() const { return end - begin; }
  WideRow &row(size_t i) { return (*rows)[begin + i]; }
  const WideRow &row(size_t i) const { return (*rows)[begin + i]; }
  int64_t ordinal(size_t i) const {
    return first_ordinal + static_cast<int64_t>(i);
  }
};

template <typename Fn>
void for_each_morsel(Rows &rows, size_t morsel_size, Fn &&fn) {
  const size_t step = morsel_size == 0 ? 128 : morsel_size;
  for (size_t begin = 0; begin < rows.size(); begin += step) {
    Morsel morsel{&rows, begin, std::min(begin + step, rows.size()),
                  static_cast<int64_t>(begin)};
    fn(morsel);
  }
}

}  // namespace relm::exec
