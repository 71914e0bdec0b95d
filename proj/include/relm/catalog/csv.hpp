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

#include <iosfwd>
#include <string>
#include <vector>

namespace relm {

/// RFC-4180 reader: quoted fields, doubled-quote escapes, embedded commas
/// and newlines, CRLF or LF line endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream &in) : in_(in) {}

  /// Reads the next record. Returns false at end of input.
  bool next(std::vector<std::string> &fields);

 private:
  std::istream &in_;
};

/// Quotes a field when it contains comma, quote, CR or LF.
std::string csv_escape(const std::string &field);

void write_csv_record(std::ostream &out, const std::vector<std::string> &fields);

}  // namespace relm
