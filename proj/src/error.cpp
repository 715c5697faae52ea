// Copyright 2026 The weld Authors
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

#include "error.hpp"

namespace weld {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Io: return "io error";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::NotFound: return "not found";
    case ErrorCode::Numeric: return "numeric error";
    case ErrorCode::Format: return "format error";
    case ErrorCode::Config: return "config error";
  }
  return "unknown error";
}

StageError::StageError(ErrorCode code, std::string stage,
                       std::string input_digest, const std::string& what)
    : Error(code, "[" + stage + "] " + what +
                      (input_digest.empty() ? "" : " (input " + input_digest + ")")),
      stage_(std::move(stage)),
      digest_(std::move(input_digest)) {}

}  // namespace weld
