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

#include "relm/sql/ast.hpp"

namespace relm::sql {

/// Parses the supported SQL subset. Throws EngineError(SyntaxError) with a
/// 1-based (line, column) or EngineError(UnsupportedFeature) naming the
/// offending token. Trailing input after the statement is an error.
QueryAst parse(const std::string &sql_text);

}  // namespace relm::sql
