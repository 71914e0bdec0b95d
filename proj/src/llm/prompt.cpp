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

#include "relm/llm/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "relm/common/error.hpp"

namespace relm {

std::string render_prompt(const std::string &template_text,
                          const std::vector<std::string> &placeholders,
                          const std::vector<Value> &values) {
  if (placeholders.size() != values.size()) {
    throw EngineError(ErrorCode::ArityMismatch,
                      "template expects " +
                          std::to_string(placeholders.size()) +
                          " value(s), got " + std::to_string(values.size()));
  }
  std::string out;
  out.reserve(template_text.size() + 64 * values.size());
  size_t pos = 0;
  while (pos < template_text.size()) {
    char c = template_text[pos];
    if (c == '{') {
      size_t close = template_text.find('}', pos + 1);
      std::string name = template_text.substr(pos + 1, close - pos - 1);
      size_t idx = 0;
      while (idx < placeholders.size() && placeholders[idx] != name) ++idx;
      const Value &v = values[idx];
      if (v.is_null()) {
        out += kNullMarker;
      } else {
        out += v.to_text();
      }
      pos = close + 1;
    } else {
      out.push_back(c);
      ++pos;
    }
  }
  return out;
}

std::string template_prefix(const std::string &template_text) {
  size_t brace = template_text.find('{');
  return brace == std::string::npos ? template_text
                                    : template_text.substr(0, brace);
}

std::string retry_clarification(const std::string &contract_description) {
  return std::string(kRetryMarker) +
         " did not match the required format. Answer with " +
         contract_description + " and output nothing else.";
}

std::string build_combined_prompt(const std::vector<InferenceRequest> &requests) {
  std::string out = kCombinedHeader;
  for (size_t i = 0; i < requests.size(); ++i) {
    out += "\n";
    out += kCombinedItemDelimiter;
    out += std::to_string(i + 1);
    out += " ===\n";
    out += requests[i].rendered_prompt;
  }
  return out;
}

std::vector<std::string> split_combined_prompt(const std::string &text) {
  std::vector<std::string> items;
  if (text.rfind(kCombinedHeader, 0) != 0) return items;
  size_t pos = text.find(kCombinedItemDelimiter);
  while (pos != std::string::npos) {
    size_t line_end = text.find('\n', pos);
    if (line_end == std::string::npos) break;
    size_t next = text.find(kCombinedItemDelimiter, line_end);
    size_t body_end = next == std::string::npos ? text.size() : next;
    std::string body = text.substr(line_end + 1, body_end - line_end - 1);
    while (!body.empty() && body.back() == '\n') body.pop_back();
    items.push_back(std::move(body));
    pos = next;
  }
  return items;
}

std::vector<std::pair<int, std::string>> parse_combined_response(
    const std::string &text) {
  std::vector<std::pair<int, std::string>> entries;
  std::vector<int> duplicated;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    size_t colon = line.find(": ");
    if (colon != std::string::npos && colon > 0) {
      bool numeric = true;
      for (size_t i = 0; i < colon; ++i) {
        if (!isdigit(static_cast<unsigned char>(line[i]))) {
          numeric = false;
          break;
        }
      }
      if (numeric && colon <= 6) {
        int ordinal = std::stoi(line.substr(0, colon));
        bool dup = false;
        for (auto &[existing, _] : entries) {
          if (existing == ordinal) {
            dup = true;
            break;
          }
        }
        if (dup) {
          duplicated.push_back(ordinal);
        } else {
          entries.emplace_back(ordinal, line.substr(colon + 2));
        }
      }
    }
    if (eol == text.size()) break;
  }
  // A duplicated ordinal means the model repeated a row; drop it entirely.
  std::erase_if(entries, [&](const auto &entry) {
    return std::find(duplicated.begin(), duplicated.end(), entry.first) !=
           duplicated.end();
  });
  return entries;
}

}  // namespace relm
