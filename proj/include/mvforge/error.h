// Copyright 2026 The mvforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVFORGE_ERROR_H_
#define MVFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvforge {

enum class ErrorCode {
  kEmptyInput,
  kMalformedCsv,
  kCardinality,
  kIndex,
  kShape,
  kVersion,
  kLayout,
  kCorrupt,
  kEmptyDataset,
  kPosition,
  kEmptyMv,
  kTooManyCharts,
  kInfeasibleRequest,
  kInsufficientHistory,
  kSessionClosed,
  kUnknownVersion,
  kConsentDenied,
  kConfig,
  kInvalidEdit,
};

std::string_view error_name(ErrorCode code);

// All recoverable failures in the library surface as this exception; the
// code lets callers (HTTP layer, CLI) map failures to status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvforge

#endif  // MVFORGE_ERROR_H_
