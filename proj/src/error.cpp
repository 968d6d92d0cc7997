// Copyright 2026 The sgwd Authors
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

#include "sgwd/error.hpp"

namespace sgwd {
namespace {

std::string join(const std::string& context,
                 const std::vector<std::string>& violations) {
  std::string msg = context.empty() ? "invalid scene graph" : context;
  for (const auto& v : violations) {
    msg += "\n  ";
    msg += v;
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : ValidationError("", std::move(violations)) {}

ValidationError::ValidationError(const std::string& context,
                                 std::vector<std::string> violations)
    : std::runtime_error(join(context, violations)),
      violations_(std::move(violations)) {}

}  // namespace sgwd
