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

#include "mvforge/error.h"

namespace mvforge {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kCardinality: return "CardinalityError";
    case ErrorCode::kIndex: return "IndexError";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kVersion: return "VersionError";
    case ErrorCode::kLayout: return "LayoutError";
    case ErrorCode::kCorrupt: return "CorruptError";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kPosition: return "PositionError";
    case ErrorCode::kEmptyMv: return "EmptyMV";
    case ErrorCode::kTooManyCharts: return "TooManyCharts";
    case ErrorCode::kInfeasibleRequest: return "InfeasibleRequest";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kSessionClosed: return "SessionClosed";
    case ErrorCode::kUnknownVersion: return "UnknownVersion";
    case ErrorCode::kConsentDenied: return "ConsentDenied";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kInvalidEdit: return "InvalidEdit";
  }
  return "Error";
}

}  // namespace mvforge
