// Copyright 2026 The gendt Authors.
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

#include "gendt/error.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace gendt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kDuplicateVertex: return "DuplicateVertex";
    case ErrorCode::kMissingSeriesFile: return "MissingSeriesFile";
    case ErrorCode::kNonFiniteSample: return "NonFiniteSample";
    case ErrorCode::kSensorMismatch: return "SensorMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNoHistory: return "NoHistory";
    case ErrorCode::kInvalidCutoff: return "InvalidCutoff";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kMissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kNonFiniteQ: return "NonFiniteQ";
    case ErrorCode::kAllAttemptsFailed: return "AllAttemptsFailed";
    case ErrorCode::kBackendUnreachable: return "BackendUnreachable";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kNoCuttingDetected: return "NoCuttingDetected";
    case ErrorCode::kDegenerateSegment: return "DegenerateSegment";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
  }
  return "Unknown";
}

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace detail
}  // namespace gendt
