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

#include "relm/common/ini.hpp"

#include <fstream>
#include <sstream>

#include "relm/common/error.hpp"
#include "relm/common/value.hpp"

namespace relm {

namespace {

std::string trim(const std::string &s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

IniDoc IniDoc::parse(const std::string &text) {
  IniDoc doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw EngineError(ErrorCode::Config,
                          "malformed section header at line " +
                              std::to_string(lineno) + ": " + t);
      }
      section = trim(t.substr(1, t.size() - 2));
      if (!doc.sections_.count(section)) {
        doc.order_.push_back(section);
        doc.sections_[section] = {};
      }
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw EngineError(ErrorCode::Config, "expected key = value at line " +
                                               std::to_string(lineno) + ": " + t);
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (!doc.sections_.count(section)) {
      doc.order_.push_back(section);
      doc.sections_[section] = {};
    }
    doc.sections_[section].emplace_back(key, value);
  }
  return doc;
}

IniDoc IniDoc::parse_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EngineError(ErrorCode::FileNotFound, "cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::optional<std::string> IniDoc::get(const std::string &section,
                                       const std::string &key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return std::nullopt;
  for (const auto &[k, v] : it->second) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string IniDoc::get_or(const std::string &section, const std::string &key,
                           const std::string &fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

int64_t IniDoc::get_int(const std::string &section, const std::string &key,
                        int64_t fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  Value parsed = parse_value(*v, ColumnType::Int64);
  return parsed.is_null() ? fallback : parsed.as_int();
}

double IniDoc::get_double(const std::string &section, const std::string &key,
                          double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  Value parsed = parse_value(*v, ColumnType::Float64);
  return parsed.is_null() ? fallback : parsed.as_float();
}

bool IniDoc::get_bool(const std::string &section, const std::string &key,
                      bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  Value parsed = parse_value(*v, ColumnType::Bool);
  return parsed.is_null() ? fallback : parsed.as_bool();
}

void IniDoc::set(const std::string &section, const std::string &key,
                 const std::string &value) {
  if (!sections_.count(section)) {
    order_.push_back(section);
    sections_[section] = {};
  }
  for (auto &[k, v] : sections_[section]) {
    if (k == key) {
      v = value;
      return;
    }
  }
  sections_[section].emplace_back(key, value);
}

bool IniDoc::has_section(const std::string &section) const {
  return sections_.count(section) > 0;
}

std::vector<std::string> IniDoc::section_names() const { return order_; }

const std::vector<std::pair<std::string, std::string>> *IniDoc::entries(
    const std::string &section) const {
  auto it = sections_.find(section);
  return it == sections_.end() ? nullptr : &it->second;
}

std::string IniDoc::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto &name : order_) {
    if (!first) out << "\n";
    first = false;
    if (!name.empty()) out << "[" << name << "]\n";
    for (const auto &[k, v] : sections_.at(name)) {
      out << k << " = " << v << "\n";
    }
  }
  return out.str();
}

void IniDoc::write_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw EngineError(ErrorCode::FileNotFound, "cannot write file: " + path);
  }
  out << serialize();
}

}  // namespace relm
