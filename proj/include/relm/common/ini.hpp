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

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relm {

/// Minimal INI document: `[section]` headers, `key = value` lines,
/// `#`/`;` comments. Keys keep insertion order within a section so that
/// serialization is deterministic and diffs stay readable.
class IniDoc {
 public:
  static IniDoc parse(const std::string &text);
  static IniDoc parse_file(const std::string &path);

  std::optional<std::string> get(const std::string &section,
                                 const std::string &key) const;
  std::string get_or(const std::string &section, const std::string &key,
                     const std::string &fallback) const;
  int64_t get_int(const std::string &section, const std::string &key,
                  int64_t fallback) const;
  double get_double(const std::string &section, const std::string &key,
                    double fallback) const;
  bool get_bool(const std::string &section, const std::string &key,
                bool fallback) const;

  void set(const std::string &section, const std::string &key,
           const std::string &value);

  bool has_section(const std::string &section) const;
  std::vector<std::string> section_names() const;
  const std::vector<std::pair<std::string, std::string>> *entries(
      const std::string &section) const;

  std::string serialize() const;
  void write_file(const std::string &path) const;

 private:
  // Section order = first appearance; entries keep file order.
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      sections_;
};

}  // namespace relm
