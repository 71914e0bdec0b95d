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

#include "relm/llm/backend.hpp"

namespace relm {

/// OpenAI-compatible chat-completions client (`POST {endpoint}/v1/chat/
/// completions`). Constraint fields are merged into the body per the
/// descriptor's dialect; the API key is read from the named environment
/// variable at construction. Safe for concurrent invoke() calls (one
/// connection per call).
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendDescriptor descriptor);

  const BackendDescriptor &descriptor() const override { return descriptor_; }

  BackendResult invoke(const InferenceRequest &request) override;

 private:
  BackendDescriptor descriptor_;
  std::string api_key_;
};

}  // namespace relm
