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

#pragma once

#include <stdexcept>
#include <string>

namespace weld {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  NotFound,
  Numeric,
  Format,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

// Base exception for everything thrown by the core library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the pipeline when a stage fails. Carries the stage name and the
// digest of the stage's inputs so a failing run can be reproduced.
class StageError : public Error {
 public:
  StageError(ErrorCode code, std::string stage, std::string input_digest,
             const std::string& what);

  const std::string& stage() const noexcept { return stage_; }
  const std::string& input_digest() const noexcept { return digest_; }

 private:
  std::string stage_;
  std::string digest_;
};

}  // namespace weld
