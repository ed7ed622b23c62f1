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

#include <Eigen/Core>

#include <compare>
#include <string>

namespace gendt {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Series = Vector<double>;

/// 1-based chronological run index.
struct RunId {
  int index = 0;

  friend auto operator<=>(const RunId&, const RunId&) = default;
};

struct StateId {
  int index = 0;
  std::string label;

  // Identity is the index; the label is validated to agree with it.
  friend bool operator==(const StateId& a, const StateId& b) {
    return a.index == b.index;
  }
  friend auto operator<=>(const StateId& a, const StateId& b) {
    return a.index <=> b.index;
  }
};

struct SensorId {
  std::string name;
  std::string unit;

  friend bool operator==(const SensorId&, const SensorId&) = default;
};

}  // namespace gendt
