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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gendt/error.hpp"
#include "gendt/types.hpp"
#include "gendt/windowing.hpp"

namespace gendt {

/// Successful ensemble attempts, one row per attempt.
struct PredictionMatrix {
  Matrix<double> rows;
  EpochPoint epoch;
};

template <typename Scalar>
struct PointEstimate {
  Vector<Scalar> median;
  Vector<Scalar> sd;  // population standard deviation per column
  Eigen::Index attempts_used = 0;
};

/// Median of a sample; for an even count, the midpoint of the two central
/// order statistics. The input is reordered.
template <typename Scalar>
Scalar median_inplace(std::vector<Scalar>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const Scalar upper = v[mid];
  if (n % 2 == 1) return upper;
  const Scalar lower = *std::max_element(v.begin(), v.begin() + mid);
  return (lower + upper) / Scalar(2);
}

/// Column-wise median and population standard deviation over the rows.
template <typename Derived>
PointEstimate<typename Derived::Scalar> aggregate(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  if (rows.rows() == 0 || rows.cols() == 0) {
    throw Error(ErrorCode::kEmptyMatrix, "prediction matrix has no rows");
  }
  PointEstimate<Scalar> out;
  out.attempts_used = rows.rows();
  out.median.resize(rows.cols());
  out.sd.resize(rows.cols());
  std::vector<Scalar> column(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const auto col = rows.col(j);
    const Scalar mean = col.mean();
    out.sd[j] = std::sqrt((col.array() - mean).square().mean());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) column[static_cast<std::size_t>(i)] = col[i];
    out.median[j] = median_inplace(column);
  }
  return out;
}

inline PointEstimate<double> aggregate(const PredictionMatrix& matrix) {
  return aggregate(matrix.rows);
}

struct ErrorStats {
  double err_avg = 0.0;
  double err_std = 0.0;
};

/// Mean and population standard deviation of |truth - estimate|.
template <typename DerivedA, typename DerivedB>
ErrorStats error_stats(const Eigen::MatrixBase<DerivedA>& estimate,
                       const Eigen::MatrixBase<DerivedB>& truth) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "estimate and truth differ in length");
  }
  if (truth.size() == 0) throw Error(ErrorCode::kEmptyInput, "empty error vector");
  const auto err = (truth - estimate).array().abs().eval();
  const double avg = static_cast<double>(err.mean());
  const double sd = std::sqrt(static_cast<double>((err - err.mean()).square().mean()));
  return {avg, sd};
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rmse(const Eigen::MatrixBase<DerivedA>& truth,
                               const Eigen::MatrixBase<DerivedB>& estimate) {
  if (truth.size() != estimate.size()) {
    throw Error(ErrorCode::kLengthMismatch, "rmse operands differ in length");
  }
  if (truth.size() == 0) throw Error(ErrorCode::kEmptyInput, "rmse of empty vectors");
  return std::sqrt((truth - estimate).array().square().mean());
}

}  // namespace gendt
