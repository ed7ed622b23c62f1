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

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gendt/types.hpp"

namespace gendt {

struct EncodingSpec {
  int decimals = 2;
  std::string separator = ",";
  double scale = 1.0;
};

void validate(const EncodingSpec& spec);

struct SensorString {
  std::string text;
  std::size_t count = 0;
};

/// Each value is divided by `scale` and printed with exactly `decimals`
/// fractional digits, ties rounded away from zero. Throws kNonFiniteValue
/// or kOverflow (|value / scale| >= 1e9).
SensorString encode(const Eigen::Ref<const Series>& values, const EncodingSpec& spec);

/// Concatenates the series oldest-first, with no marker between runs, and
/// encodes the result as one sequence.
SensorString encode_history(const std::vector<Series>& history, const EncodingSpec& spec);

struct DecodeFailure {
  enum class Kind { kShort, kMalformed };
  Kind kind = Kind::kShort;
  // Parsed value count for kShort; zero-based token position for kMalformed.
  std::size_t detail = 0;

  friend bool operator==(const DecodeFailure&, const DecodeFailure&) = default;
};

std::string_view to_string(DecodeFailure::Kind kind);

struct Decoded {
  Series values;
  bool prose_stripped = false;     // text preceding the first number dropped
  bool trailing_stripped = false;  // terminal '.' or empty token dropped
};

using DecodeResult = std::variant<Decoded, DecodeFailure>;

/// Parses untrusted model output. Total: never throws for any input text and
/// any expected_len >= 0. Values past `expected_len` are ignored.
DecodeResult decode(std::string_view text, const EncodingSpec& spec,
                    Eigen::Index expected_len);

inline constexpr std::string_view kPromptPlaceholder = "<ENCODED TOKENIZED STRING>";

std::string_view default_prompt_template();

/// Substitutes the first placeholder occurrence. Throws kMissingPlaceholder.
std::string build_prompt(const SensorString& sequence, std::string_view prompt_template);

}  // namespace gendt
