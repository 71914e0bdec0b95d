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

#include <string>
#include <utility>
#include <vector>

#include "relm/common/value.hpp"
#include "relm/llm/backend.hpp"

namespace relm {

/// Substitutes placeholder occurrences by position: the i-th distinct
/// placeholder takes the i-th value. NULL renders as `<NULL>` so prompts for
/// different rows stay distinguishable. The template text before the first
/// placeholder is preserved verbatim; prefix sharing depends on it.
std::string render_prompt(const std::string &template_text,
                          const std::vector<std::string> &placeholders,
                          const std::vector<Value> &values);

/// Template text before the first placeholder (the shareable prefix).
std::string template_prefix(const std::string &template_text);

inline constexpr const char *kNullMarker = "<NULL>";

/// Fixed system prompt sent with every request. Excluded from correctness
/// claims; documented in the README.
inline constexpr const char *kSystemPrompt =
    "You are a query execution assistant. Reply with exactly the requested "
    "output and nothing else: no explanations, no punctuation around the "
    "answer, no extra lines.";

/// Line appended to a re-prompt after a validation failure; restates the
/// contract. One fixed strategy, applied once per retry attempt.
std::string retry_clarification(const std::string &contract_description);

/// Marker prefix of the clarification line (the mock backend counts these to
/// model instruction reinforcement).
inline constexpr const char *kRetryMarker = "IMPORTANT: your previous answer";

// Combined-call format for Budgeted envelopes: one backend call carrying
// several rows, answered as one `i: <answer>` line per row. Best effort;
// rows whose line is missing or malformed are retried individually.

inline constexpr const char *kCombinedHeader =
    "Answer each of the following numbered items independently. Output "
    "exactly one line per item, formatted as 'N: <answer>'.";
inline constexpr const char *kCombinedItemDelimiter = "=== ITEM ";

/// All requests must share one contract (enforced by batch assembly).
std::string build_combined_prompt(const std::vector<InferenceRequest> &requests);

/// Extracts `(ordinal, answer)` pairs from a combined response. Ordinals
/// with duplicated lines are dropped (ambiguous row mapping).
std::vector<std::pair<int, std::string>> parse_combined_response(
    const std::string &text);

/// Splits a combined prompt back into per-item bodies; used by the mock
/// backend to emulate a compliant model. Returns empty unless the text
/// starts with kCombinedHeader.
std::vector<std::string> split_combined_prompt(const std::string &text);

}  // namespace relm
