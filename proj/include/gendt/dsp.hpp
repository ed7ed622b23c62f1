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

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gendt/error.hpp"
#include "gendt/ptog.hpp"
#include "gendt/types.hpp"

namespace gendt {

struct FilterSpec {
  double cutoff_hz = 8.0;
  int order = 4;
  double sample_rate_hz = 0.0;
  // Forward-backward pass; offline replay only, the live path is causal.
  bool zero_phase = false;
};

struct DownsampleSpec {
  int factor = 1;
};

inline void validate(const FilterSpec& spec) {
  if (spec.order < 1) {
    throw Error(ErrorCode::kInvalidArgument, "filter order must be >= 1");
  }
  if (!(spec.sample_rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  if (!(spec.cutoff_hz > 0.0) || !(spec.cutoff_hz < spec.sample_rate_hz / 2.0)) {
    throw Error(ErrorCode::kInvalidCutoff,
                "cutoff " + std::to_string(spec.cutoff_hz) +
                    " Hz must lie in (0, Nyquist) for rate " +
                    std::to_string(spec.sample_rate_hz) + " Hz");
  }
}

/// Factor that brings `sample_rate_hz` closest to `target_rate_hz`
/// (rounded half away from zero, never below 1).
inline DownsampleSpec downsample_for_rate(double sample_rate_hz, double target_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !(target_rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rates must be positive");
  }
  const double f = std::round(sample_rate_hz / target_rate_hz);
  return DownsampleSpec{f < 1.0 ? 1 : static_cast<int>(f)};
}

/// Normalised second-order section, a0 == 1:
///   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
/// A first-order section has b2 == a2 == 0.
template <typename Scalar>
struct Biquad {
  Scalar b0{}, b1{}, b2{}, a1{}, a2{};
};

/// Butterworth low-pass as a cascade of biquads, via the bilinear transform
/// with the cutoff pre-warped so the digital response is exactly -3.01 dB
/// at `cutoff_hz`. Odd orders end with one first-order section.
template <typename Scalar = double>
std::vector<Biquad<Scalar>> butterworth_sections(const FilterSpec& spec) {
  validate(spec);
  using std::numbers::pi;
  const double k = std::tan(pi * spec.cutoff_hz / spec.sample_rate_hz);
  const double k2 = k * k;
  std::vector<Biquad<Scalar>> out;
  for (int i = 0; i < spec.order / 2; ++i) {
    // Analog prototype pole pair s^2 + s/q + 1.
    const double q = 1.0 / (2.0 * std::sin((2 * i + 1) * pi / (2.0 * spec.order)));
    const double norm = 1.0 / (1.0 + k / q + k2);
    Biquad<Scalar> s;
    s.b0 = static_cast<Scalar>(k2 * norm);
    s.b1 = static_cast<Scalar>(2.0 * k2 * norm);
    s.b2 = s.b0;
    s.a1 = static_cast<Scalar>(2.0 * (k2 - 1.0) * norm);
    s.a2 = static_cast<Scalar>((1.0 - k / q + k2) * norm);
    out.push_back(s);
  }
  if (spec.order % 2 == 1) {
    const double norm = 1.0 / (1.0 + k);
    Biquad<Scalar> s;
    s.b0 = static_cast<Scalar>(k * norm);
    s.b1 = s.b0;
    s.a1 = static_cast<Scalar>((k - 1.0) * norm);
    out.push_back(s);
  }
  return out;
}

namespace detail {

// Transposed direct form II, zero initial state, in place.
template <typename Scalar>
void run_cascade(const std::vector<Biquad<Scalar>>& sections, Vector<Scalar>& y) {
  for (const auto& s : sections) {
    Scalar z1{}, z2{};
    for (Eigen::Index n = 0; n < y.size(); ++n) {
      const Scalar in = y[n];
      const Scalar out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y[n] = out;
    }
  }
}

}  // namespace detail

/// Causal Butterworth low-pass; output has the input's length.
template <typename Derived>
Vector<typename Derived::Scalar> lowpass(const Eigen::MatrixBase<Derived>& x,
                                         const FilterSpec& spec) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) throw Error(ErrorCode::kEmptyInput, "lowpass of empty series");
  const auto sections = butterworth_sections<Scalar>(spec);
  Vector<Scalar> y = x;
  detail::run_cascade(sections, y);
  if (spec.zero_phase) {
    y.reverseInPlace();
    detail::run_cascade(sections, y);
    y.reverseInPlace();
  }
  return y;
}

/// Keeps x[0], x[d], x[2d], ...
template <typename Derived>
Vector<typename Derived::Scalar> downsample(const Eigen::MatrixBase<Derived>& x,
                                            DownsampleSpec spec) {
  if (x.size() == 0) throw Error(ErrorCode::kEmptyInput, "downsample of empty series");
  if (spec.factor < 1) {
    throw Error(ErrorCode::kInvalidArgument, "downsample factor must be >= 1");
  }
  const Eigen::Index n = (x.size() + spec.factor - 1) / spec.factor;
  Vector<typename Derived::Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = x[i * spec.factor];
  return out;
}

/// downsample(lowpass(series)). The filter runs at the series' own sample
/// rate; `filter.sample_rate_hz` is ignored.
Series preprocess(const MeasurementSeries& series, FilterSpec filter, DownsampleSpec ds);

}  // namespace gendt
