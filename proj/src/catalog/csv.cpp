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

#include "relm/catalog/csv.hpp"

#include <istream>
#include <ostream>

namespace relm {

bool CsvReader::next(std::vector<std::string> &fields) {
  fields.clear();
  int c = in_.get();
  if (c == EOF) return false;

  std::string field;
  bool in_quotes = false;
  bool any = false;

  while (true) {
    if (c == EOF) {
      fields.push_back(field);
      return true;
    }
    any = true;
    if (in_quotes) {
      if (c == '"') {
        int peek = in_.get();
        if (peek == '"') {
          field.push_back('"');  // doubled quote escape
        } else {
          in_quotes = false;
          c = peek;
          continue;
        }
      } else {
        field.push_back(static_cast<char>(c));
      }
    } else {
      if (c == '"' && field.empty()) {
        in_quotes = true;
      } else if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else if (c == '\r') {
        int peek = in_.get();
        if (peek == '\n' || peek == EOF) {
          fields.push_back(field);
          return true;
        }
        field.push_back('\r');
        c = peek;
        continue;
      } else if (c == '\n') {
        fields.push_back(field);
        return true;
      } else {
        field.push_back(static_cast<char>(c));
      }
    }
    c = in_.get();
  }
  (void)any;
}

std::string csv_escape(const std::string &field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

void write_csv_record(std::ostream &out, const std::vector<std::string> &fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

}  // namespace relm
