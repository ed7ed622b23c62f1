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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gendt/ensemble.hpp"
#include "gendt/error.hpp"
#include "support.hpp"

using namespace gendt;
using namespace gendt::testing;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

double direct_rmse(const Series& a, const Series& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("single row is its own median with zero spread") {
    Eigen::MatrixXd m(1, 3);
    m << 1.0, -2.0, 3.5;
    const auto est = aggregate(m);
    CHECK(est.median == Series(m.row(0).transpose()));
    CHECK(est.sd.isZero());
    CHECK(est.attempts_used == 1);
  }

  TEST_CASE("odd and even counts") {
    Eigen::MatrixXd odd(3, 1);
    odd << 1, 100, 2;
    CHECK(aggregate(odd).median[0] == 2.0);
    Eigen::MatrixXd even(4, 1);
    even << 4, 1, 3, 2;
    CHECK(aggregate(even).median[0] == 2.5);
    Eigen::MatrixXd two(2, 1);
    two << 0, 1;
    CHECK(aggregate(two).sd[0] == 0.5);  // population, not sample
  }

  TEST_CASE("empty matrix") {
    CHECK_THROWS_AS(aggregate(Eigen::MatrixXd(0, 4)), Error);
  }

  TEST_CASE("sort oracle, direct stats, permutation invariance") {
    Rng rng(31);
    std::uniform_int_distribution<int> rows(1, 12), cols(1, 60);
    for (int t = 0; t < 500; ++t) {
      const Eigen::MatrixXd m = random_matrix(rng, rows(rng), cols(rng));
      const auto est = aggregate(m);
      REQUIRE(est.median == median_oracle(m));
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double mean = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) mean += m(i, j);
        mean /= static_cast<double>(m.rows());
        double var = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) var += (m(i, j) - mean) * (m(i, j) - mean);
        CHECK(std::abs(est.sd[j] - std::sqrt(var / static_cast<double>(m.rows()))) <= 1e-12);
      }
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(m.rows()));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Eigen::MatrixXd p(m.rows(), m.cols());
      for (Eigen::Index i = 0; i < m.rows(); ++i) p.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
      const auto est_p = aggregate(p);
      REQUIRE(est_p.median == est.median);
      CHECK((est_p.sd - est.sd).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("one corrupted row moves the median at most one order statistic") {
    Rng rng(32);
    std::uniform_int_distribution<int> rows(3, 11);
    std::uniform_real_distribution<double> wild(-1e6, 1e6);
    for (int t = 0; t < 300; ++t) {
      const Eigen::MatrixXd m = random_matrix(rng, rows(rng), 20);
      Eigen::MatrixXd bad = m;
      std::uniform_int_distribution<Eigen::Index> which(0, m.rows() - 1);
      const Eigen::Index r = which(rng);
      for (Eigen::Index j = 0; j < m.cols(); ++j) bad(r, j) = wild(rng);
      const Series med = aggregate(bad).median;
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::vector<double> c(m.col(j).data(), m.col(j).data() + m.rows());
        std::sort(c.begin(), c.end());
        const std::size_t k = c.size();
        const double lo = c[(k - 1) / 2 - ((k - 1) / 2 > 0 ? 1 : 0)];
        const double hi = c[std::min(k - 1, k / 2 + 1)];
        CHECK(med[j] >= lo);
        CHECK(med[j] <= hi);
      }
    }
  }

  TEST_CASE("error_stats examples and oracle") {
    const Series t = Series::LinSpaced(10, 0.0, 9.0);
    const auto zero = error_stats(t, t);
    CHECK(zero.err_avg == 0.0);
    CHECK(zero.err_std == 0.0);
    const auto off = error_stats((t.array() + 1.0).matrix().eval(), t);
    CHECK(off.err_avg == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(off.err_std <= 1e-15);
    CHECK_THROWS_AS(error_stats(Series::Ones(3), Series::Ones(4)), Error);

    Rng rng(33);
    for (int k = 0; k < 500; ++k) {
      const Series a = random_series(rng, 100), b = random_series(rng, 100);
      double mean = 0.0;
      for (int i = 0; i < 100; ++i) mean += std::abs(b[i] - a[i]);
      mean /= 100.0;
      double var = 0.0, worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const double e = std::abs(b[i] - a[i]);
        var += (e - mean) * (e - mean);
        worst = std::max(worst, e);
      }
      const auto s = error_stats(a, b);
      REQUIRE(std::abs(s.err_avg - mean) <= 1e-12);
      REQUIRE(std::abs(s.err_std - std::sqrt(var / 100.0)) <= 1e-12);
      CHECK(worst >= s.err_avg);
    }
  }

  TEST_CASE("rmse examples and properties") {
    CHECK(rmse(Series::Zero(2), (Series(2) << 3, 4).finished()) ==
          doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
    CHECK_THROWS_AS(rmse(Series(), Series()), Error);
    CHECK_THROWS_AS(rmse(Series::Ones(2), Series::Ones(3)), Error);
    Rng rng(34);
    for (int k = 0; k < 500; ++k) {
      const Series a = random_series(rng, 57), b = random_series(rng, 57);
      REQUIRE(std::abs(rmse(a, b) - direct_rmse(a, b)) <= 1e-12);
      CHECK(rmse(a, a) == 0.0);
      CHECK(rmse(a, b) == rmse(b, a));
      CHECK(rmse(a, b) >= error_stats(b, a).err_avg - 1e-12);
    }
  }

  TEST_CASE("float matrices use the same code path") {
    Eigen::MatrixXf m(3, 2);
    m << 1, 4, 2, 5, 3, 9;
    const auto est = aggregate(m);
    CHECK(est.median[0] == 2.0f);
    CHECK(est.median[1] == 5.0f);
  }
}
