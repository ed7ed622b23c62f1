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
#include <limits>

#include "doctest.h"
#include "gendt/error.hpp"
#include "gendt/ptog.hpp"
#include "support.hpp"

using namespace gendt;
using namespace gendt::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIoError;
}

Manifest manifest_for(int runs, int states) {
  Manifest m;
  for (int r = 1; r <= runs; ++r) {
    for (int s = 1; s <= states; ++s) {
      ManifestEntry e;
      e.run = r;
      e.state_label = "P" + std::to_string(s);
      e.sensor = "spindle_current";
      e.unit = "A";
      e.sample_rate_hz = 250.0;
      e.csv_path = "run_" + std::to_string(r) + "_P" + std::to_string(s) + ".csv";
      m.entries.push_back(e);
    }
  }
  return m;
}

std::vector<double> three_samples(const std::string&) { return {1.0, 2.0, 3.0}; }

}  // namespace

TEST_SUITE("ptog") {
  TEST_CASE("14 runs by 3 states gives 42 vertices in run order") {
    const Ptog g = build_ptog(manifest_for(14, 3), three_samples);
    CHECK(g.vertex_count() == 42);
    CHECK(g.runs().size() == 14);
    CHECK(g.states().size() == 3);
    for (std::size_t i = 1; i < g.runs().size(); ++i) {
      CHECK(g.runs()[i - 1] < g.runs()[i]);
    }
    const auto p1 = g.find_state("P1");
    REQUIRE(p1);
    CHECK(g.get_series(RunId{7}, *p1) != nullptr);
    CHECK(g.get_series(RunId{99}, *p1) == nullptr);
  }

  TEST_CASE("empty manifest gives an empty, valid graph") {
    const Ptog g = build_ptog(Manifest{}, three_samples);
    CHECK(g.vertex_count() == 0);
    CHECK(g.get_series(RunId{1}, StateId{1, "P1"}) == nullptr);
  }

  TEST_CASE("validation errors") {
    Manifest dup = manifest_for(4, 1);
    dup.entries.push_back(dup.entries[2]);
    CHECK(code_of([&] { build_ptog(dup, three_samples); }) == ErrorCode::kDuplicateVertex);

    Manifest two_sensors = manifest_for(2, 1);
    two_sensors.entries[1].sensor = "vibration";
    CHECK(code_of([&] { build_ptog(two_sensors, three_samples); }) ==
          ErrorCode::kSensorMismatch);

    CHECK(code_of([&] {
            build_ptog(manifest_for(1, 1), [](const std::string&) {
              return std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()};
            });
          }) == ErrorCode::kNonFiniteSample);

    CHECK(code_of([&] { build_ptog(scratch_dir("ptog_missing") / "manifest.json"); }) ==
          ErrorCode::kIoError);
  }

  TEST_CASE("missing series file") {
    const auto dir = scratch_dir("ptog_csv");
    save_manifest(manifest_for(1, 1), dir / "manifest.json");
    CHECK(code_of([&] { build_ptog(dir / "manifest.json"); }) == ErrorCode::kMissingSeriesFile);
    write_sample_csv(dir / "run_1_P1.csv", {0.5, 1.25, -3.0});
    const Ptog g = build_ptog(dir / "manifest.json");
    REQUIRE(g.vertex_count() == 1);
    CHECK(g.series().begin()->second.samples == (Series(3) << 0.5, 1.25, -3.0).finished());
  }

  TEST_CASE("edges: succession within a run, alignment across runs") {
    Ptog g;
    g.add_series(make_series(1, 1, Series::Ones(2)));
    g.add_series(make_series(1, 3, Series::Ones(2)));
    g.add_series(make_series(2, 1, Series::Ones(2)));
    g.add_series(make_series(4, 3, Series::Ones(2)));
    int succession = 0, alignment = 0;
    for (const auto& e : g.edges()) {
      if (e.kind == Ptog::EdgeKind::kSuccession) {
        ++succession;
        CHECK(e.from.first == e.to.first);
        CHECK(e.from.second < e.to.second);
      } else {
        ++alignment;
        CHECK(e.from.second == e.to.second);
        CHECK(e.from.first < e.to.first);
      }
    }
    CHECK(succession == 1);  // (1,P1) -> (1,P3)
    CHECK(alignment == 2);   // P1: 1 -> 2, P3: 1 -> 4
  }

  TEST_CASE("round trip over random graphs, byte-identical saves") {
    Rng rng(20260101);
    RandomGraphSpec spec;
    spec.max_runs = 20;
    spec.max_states = 6;
    for (int i = 0; i < 200; ++i) {
      const Ptog g = random_ptog(rng, spec);
      const std::string a = ptog_to_string(g);
      const Ptog back = ptog_from_string(a);
      REQUIRE(back == g);
      CHECK(ptog_to_string(back) == a);
    }
  }

  TEST_CASE("save and load through files") {
    Rng rng(3);
    const Ptog g = random_ptog(rng);
    const auto dir = scratch_dir("ptog_files");
    save_ptog(g, dir / "a.json");
    save_ptog(g, dir / "b.json");
    CHECK(read_text(dir / "a.json") == read_text(dir / "b.json"));
    CHECK(load_ptog(dir / "a.json") == g);
  }

  TEST_CASE("corrupted or foreign files are rejected") {
    CHECK(code_of([] { ptog_from_string("{not json"); }) == ErrorCode::kParseError);
    CHECK(code_of([] { ptog_from_string(R"({"runs":[],"states":[],"series":[]})"); }) ==
          ErrorCode::kSchemaVersionMismatch);
    CHECK(code_of([] {
            ptog_from_string(R"({"schema_version":2,"runs":[],"states":[],"series":[]})");
          }) == ErrorCode::kSchemaVersionMismatch);
    CHECK(code_of([] { load_ptog("/nonexistent/ptog.json"); }) == ErrorCode::kIoError);
  }

  TEST_CASE("manifest text is stable and loads back") {
    const Manifest m = manifest_for(3, 2);
    const auto dir = scratch_dir("ptog_manifest");
    save_manifest(m, dir / "m.json");
    const Manifest back = load_manifest(dir / "m.json");
    REQUIRE(back.entries.size() == m.entries.size());
    CHECK(manifest_to_string(back) == manifest_to_string(m));
  }

  TEST_CASE("sample csv keeps shortest round-trip values") {
    const auto dir = scratch_dir("ptog_samples");
    const std::vector<double> v = {0.1, 1.0 / 3.0, -2.5e-7, 4.0};
    write_sample_csv(dir / "s.csv", v);
    CHECK(read_sample_csv(dir / "s.csv") == v);
  }
}
