// Copyright 2026 The Paraflow Authors. All Rights Reserved.
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

namespace paraflow {

// Base for all recoverable failures. `code` is a short machine-readable
// reason ("parse", "align", "bad-dim", ...) that tests and the CLI match on.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Bad or inconsistent input data (exit code 2 at the CLI).
class DataError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss (exit code 3 at the CLI).
class DivergedError : public Error {
 public:
  explicit DivergedError(const std::string& message) : Error("diverged", message) {}
};

}  // namespace paraflow
