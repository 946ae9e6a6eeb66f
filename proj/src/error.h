// Copyright 2026 The sfns Authors.
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

#ifndef SFNS_ERROR_H_
#define SFNS_ERROR_H_

#include <stdexcept>
#include <string>

namespace sfns {

// Mirrors sfns_status in the C API; values must stay in sync.
enum class ErrorCode {
  kValidation = 1,
  kIo = 2,
  kFormat = 3,
  kChecksum = 4,
  kVersion = 5,
  kTruncated = 6,
  kInternal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error ValidationError(const std::string& message) {
  return Error(ErrorCode::kValidation, message);
}

inline Error IoError(const std::string& message) {
  return Error(ErrorCode::kIo, message);
}

inline Error FormatError(const std::string& message) {
  return Error(ErrorCode::kFormat, message);
}

}  // namespace sfns

#endif  // SFNS_ERROR_H_
