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

#include "gendt/codec.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>

#include "gendt/error.hpp"

namespace gendt {

namespace {

constexpr double kEncodeLimit = 1e9;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// True when |x| * 10^decimals has a fractional part of exactly one half.
// With x = m * 2^e and m odd, x * 10^d = (m * 5^d) * 2^(e + d) and m * 5^d is
// odd, so the product ends in .5 iff e + d == -1.
bool is_decimal_tie(double x, int decimals) {
  if (x == 0.0) return false;
  int exp = 0;
  const double frac = std::frexp(std::fabs(x), &exp);
  auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  exp -= 53;
  while ((mant & 1u) == 0) {
    mant >>= 1;
    ++exp;
  }
  return exp + decimals == -1;
}

void append_fixed(std::string& out, double x, int decimals) {
  // Correctly rounded fixed formatting breaks exact ties to even; step one
  // ulp outward so they round away from zero instead.
  if (is_decimal_tie(x, decimals)) {
    x = std::nextafter(x, x > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity());
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, decimals);
  const char* begin = buf;
  if (*begin == '-') {
    bool all_zero = true;
    for (const char* p = begin + 1; p != end; ++p) {
      if (*p != '0' && *p != '.') all_zero = false;
    }
    if (all_zero) ++begin;
  }
  out.append(begin, static_cast<std::size_t>(end - begin));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// [+-]? (digits ('.' digits*)? | '.' digits) ([eE] [+-]? digits)?
bool is_decimal_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && is_digit(s[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

bool parse_token(std::string_view token, double scale, double& out) {
  token = trim(token);
  if (!is_decimal_literal(token)) return false;
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || p != token.data() + token.size()) return false;
  v *= scale;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

std::size_t first_number_start(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_digit(s[i])) return i;
    if (s[i] == '+' || s[i] == '-' || s[i] == '.') {
      std::size_t j = i + 1;
      if (s[i] != '.' && j < s.size() && s[j] == '.') ++j;
      if (j < s.size() && is_digit(s[j])) return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

void validate(const EncodingSpec& spec) {
  if (spec.decimals < 0 || spec.decimals > 10) {
    throw Error(ErrorCode::kInvalidArgument, "decimals must lie in [0, 10]");
  }
  if (spec.separator.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "separator must be non-empty");
  }
  for (char c : spec.separator) {
    if (is_digit(c) || c == '+' || c == '-' || c == '.') {
      throw Error(ErrorCode::kInvalidArgument,
                  "separator may not contain digits, signs or '.'");
    }
  }
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  }
}

SensorString encode(const Eigen::Ref<const Series>& values, const EncodingSpec& spec) {
  validate(spec);
  SensorString out;
  out.text.reserve(static_cast<std::size_t>(values.size()) * (spec.decimals + 4));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteValue, "value " + std::to_string(i) + " is not finite");
    }
    const double scaled = v / spec.scale;
    if (!(std::fabs(scaled) < kEncodeLimit)) {
      throw Error(ErrorCode::kOverflow, "value " + std::to_string(i) + " exceeds 1e9");
    }
    if (i > 0) out.text += spec.separator;
    append_fixed(out.text, scaled, spec.decimals);
  }
  out.count = static_cast<std::size_t>(values.size());
  return out;
}

SensorString encode_history(const std::vector<Series>& history, const EncodingSpec& spec) {
  Eigen::Index total = 0;
  for (const auto& s : history) total += s.size();
  Series joined(total);
  Eigen::Index at = 0;
  for (const auto& s : history) {
    joined.segment(at, s.size()) = s;
    at += s.size();
  }
  return encode(joined, spec);
}

std::string_view to_string(DecodeFailure::Kind kind) {
  return kind == DecodeFailure::Kind::kShort ? "short" : "malformed";
}

DecodeResult decode(std::string_view text, const EncodingSpec& spec,
                    Eigen::Index expected_len) {
  Decoded result;
  const auto wanted = static_cast<std::size_t>(expected_len < 0 ? 0 : expected_len);
  const std::string_view sep = spec.separator.empty() ? std::string_view(",")
                                                      : std::string_view(spec.separator);
  const double scale = (spec.scale > 0.0 && std::isfinite(spec.scale)) ? spec.scale : 1.0;

  const std::size_t start = first_number_start(text);
  if (start == std::string_view::npos) {
    if (wanted == 0) return result;
    return DecodeFailure{DecodeFailure::Kind::kShort, 0};
  }
  result.prose_stripped = !trim(text.substr(0, start)).empty();
  std::string_view rest = trim(text.substr(start));

  std::vector<std::string_view> tokens;
  while (tokens.size() < wanted + 1) {
    const std::size_t pos = rest.find(sep);
    if (pos == std::string_view::npos) {
      tokens.push_back(rest);
      break;
    }
    tokens.push_back(rest.substr(0, pos));
    rest = rest.substr(pos + sep.size());
  }
  // A trailing separator leaves one empty token behind.
  if (tokens.size() <= wanted && !tokens.empty() && trim(tokens.back()).empty()) {
    tokens.pop_back();
    result.trailing_stripped = true;
  }

  std::vector<double> values;
  values.reserve(wanted);
  for (std::size_t i = 0; i < tokens.size() && values.size() < wanted; ++i) {
    double v = 0.0;
    if (parse_token(tokens[i], scale, v)) {
      values.push_back(v);
      continue;
    }
    // The prompt ends in '.', and models sometimes echo it after the last value.
    std::string_view t = trim(tokens[i]);
    const bool last = i + 1 == tokens.size();
    if (last && !t.empty() && t.back() == '.' &&
        parse_token(t.substr(0, t.size() - 1), scale, v)) {
      values.push_back(v);
      result.trailing_stripped = true;
      continue;
    }
    return DecodeFailure{DecodeFailure::Kind::kMalformed, i};
  }
  if (values.size() < wanted) {
    return DecodeFailure{DecodeFailure::Kind::kShort, values.size()};
  }
  result.values = Eigen::Map<const Series>(values.data(), static_cast<Eigen::Index>(values.size()));
  return result;
}

std::string_view default_prompt_template() {
  return "You are a helpful assistant who performs time series predictions.\n"
         "The user will provide a sequence, and you will predict the remaining sequence.\n"
         "The sequence is represented by decimal strings separated by commas.\n"
         "Please continue the following sequence without producing any additional text.\n"
         "Do not say anything like 'the next terms in the sequence are', just return the numbers.\n"
         "Sequence: <ENCODED TOKENIZED STRING>.";
}

std::string build_prompt(const SensorString& sequence, std::string_view prompt_template) {
  const std::size_t pos = prompt_template.find(kPromptPlaceholder);
  if (pos == std::string_view::npos) {
    throw Error(ErrorCode::kMissingPlaceholder,
                "prompt template lacks " + std::string(kPromptPlaceholder));
  }
  std::string out;
  out.reserve(prompt_template.size() + sequence.text.size());
  out.append(prompt_template.substr(0, pos));
  out.append(sequence.text);
  out.append(prompt_template.substr(pos + kPromptPlaceholder.size()));
  return out;
}

}  // namespace gendt
