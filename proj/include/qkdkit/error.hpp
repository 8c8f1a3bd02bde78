// Copyright 2026 The qkdkit Authors
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

namespace qkdkit {

enum class ErrorKind {
  kParse,
  kNotHermitian,
  kNotPsd,
  kBadTrace,
  kNotCptp,
  kBadEffect,
  kBadDistribution,
  kInvalidState,
  kUnsupportedLengths,
  kEmptyPath,
  kBadConfig,
  kDimMismatch,
  kDimensionOverflow,
  kEigensolverFailure,
};

// Error families map onto CLI exit codes: 1 parse, 2 validation, 3 dimension,
// 4 numerical.
enum class ErrorFamily { kParse = 1, kValidation = 2, kDimension = 3, kNumerical = 4 };

const char* to_string(ErrorKind kind);
ErrorFamily family_of(ErrorKind kind);

class QkdError : public std::runtime_error {
 public:
  QkdError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorFamily family() const noexcept { return family_of(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace qkdkit
