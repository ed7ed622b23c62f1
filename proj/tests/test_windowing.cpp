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

#include "doctest.h"
#include "gendt/error.hpp"
#include "gendt/windowing.hpp"
#include "support.hpp"

using namespace gendt;
using namespace gendt::testing;

namespace {

std::vector<int> runs_of(const ObservationWindow& w) {
  std::vector<int> out;
  for (const auto& s : w.history) out.push_back(s.run.index);
  return out;
}

Ptog full_graph(int runs, int states) {
  Ptog g;
  for (int r = 1; r <= runs; ++r) {
    for (int s = 1; s <= states; ++s) g.add_series(make_series(r, s, Series::Constant(4, r)));
  }
  return g;
}

}  // namespace

TEST_SUITE("windowing") {
  TEST_CASE("run 7 P1 with depth 4 sees runs 3 to 6") {
    const Ptog g = full_graph(14, 3);
    const auto w = extract_window(g, {RunId{7}, StateId{1, "P1"}}, 4);
    CHECK(runs_of(w) == std::vector<int>{3, 4, 5, 6});
    CHECK_FALSE(w.short_history());
    CHECK(w.state.label == "P1");
    CHECK(w.sensor.unit == "A");
  }

  TEST_CASE("short history is allowed, zero history is not") {
    const Ptog g = full_graph(3, 1);
    const auto w = extract_window(g, {RunId{2}, StateId{1, "P1"}}, 4);
    CHECK(runs_of(w) == std::vector<int>{1});
    CHECK(w.short_history());
    CHECK_THROWS_AS(extract_window(g, {RunId{1}, StateId{1, "P1"}}, 4), Error);
    try {
      extract_window(g, {RunId{1}, StateId{1, "P1"}}, 4);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoHistory);
    }
  }

  TEST_CASE("target need not be a vertex and is never in its own window") {
    const Ptog g = full_graph(5, 2);
    const auto w = extract_window(g, {RunId{9}, StateId{2, "P2"}}, 3);
    CHECK(runs_of(w) == std::vector<int>{3, 4, 5});
  }

  TEST_CASE("milling layout yields 30 epochs over runs 5 to 14") {
    const Ptog g = full_graph(14, 3);
    const auto epochs = enumerate_epochs(g, 4);
    REQUIRE(epochs.size() == 30);
    CHECK(epochs.front().run.index == 5);
    CHECK(epochs.back().run.index == 14);
    CHECK(enumerate_epochs(g, 1).front().run.index == 2);
  }

  TEST_CASE("state present only in run 1 has no epochs") {
    Ptog g = full_graph(4, 1);
    g.add_series(make_series(1, 2, Series::Ones(3)));
    for (const auto& e : enumerate_epochs(g, 1)) CHECK(e.state.index == 1);
  }

  TEST_CASE("min_history below 1 is rejected") {
    CHECK_THROWS_AS(enumerate_epochs(full_graph(2, 1), 0), Error);
  }

  TEST_CASE("random sparse graphs match the brute-force oracles") {
    Rng rng(1234);
    std::uniform_int_distribution<int> depth(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
      const Ptog g = random_ptog(rng);
      const int h = depth(rng);
      for (const auto& run : g.runs()) {
        for (const auto& state : g.states()) {
          const auto expected = window_oracle(g, run.index, state.index, h);
          if (expected.empty()) {
            CHECK_THROWS_AS(extract_window(g, {run, state}, h), Error);
            continue;
          }
          const auto w = extract_window(g, {run, state}, h);
          REQUIRE(runs_of(w) == expected);
          for (const auto& s : w.history) REQUIRE(s.state == state);
        }
      }
      const int mh = depth(rng);
      std::vector<std::pair<int, int>> got;
      for (const auto& e : enumerate_epochs(g, mh)) got.emplace_back(e.run.index, e.state.index);
      REQUIRE(got == epochs_oracle(g, mh));
    }
  }

  TEST_CASE("enumerate_epochs is monotone in min_history") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const Ptog g = random_ptog(rng);
      for (int h = 2; h <= 6; ++h) {
        const auto big = enumerate_epochs(g, h - 1);
        for (const auto& e : enumerate_epochs(g, h)) {
          CHECK(std::find(big.begin(), big.end(), e) != big.end());
        }
      }
    }
  }
}
