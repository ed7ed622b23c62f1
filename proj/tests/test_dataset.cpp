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

#include <array>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "gendt/dataset.hpp"
#include "gendt/error.hpp"
#include "gendt/windowing.hpp"
#include "json.hpp"
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

struct Trapezoid {
  Series x;
  Eigen::Index rise_end, fall_start;
};

// idle, linear rise, plateau, linear fall, idle.
Trapezoid trapezoid(Eigen::Index idle, Eigen::Index rise, Eigen::Index flat, Eigen::Index fall,
                    double level, double sigma, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> v;
  for (Eigen::Index i = 0; i < idle; ++i) v.push_back(0.0);
  for (Eigen::Index i = 1; i <= rise; ++i) v.push_back(level * static_cast<double>(i) / rise);
  const Eigen::Index rise_end = static_cast<Eigen::Index>(v.size());
  for (Eigen::Index i = 0; i < flat; ++i) v.push_back(level);
  const Eigen::Index fall_start = static_cast<Eigen::Index>(v.size());
  for (Eigen::Index i = 1; i <= fall; ++i) v.push_back(level * (1.0 - static_cast<double>(i) / fall));
  for (Eigen::Index i = 0; i < idle; ++i) v.push_back(0.0);
  Series x = Eigen::Map<Series>(v.data(), static_cast<Eigen::Index>(v.size()));
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += noise(rng);
  }
  return {x, rise_end, fall_start};
}

std::filesystem::path copy_fixture(const std::string& name) {
  const auto dir = scratch_dir(name);
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir())) {
    std::filesystem::copy_file(e.path(), dir / e.path().filename());
  }
  return dir;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("explicit boundaries slice the series") {
    SegmentationSpec spec;
    spec.boundaries = {0, 100, 400, 500};
    const Series x = Series::LinSpaced(600, 0.0, 599.0);
    const Segments s = segment(x, spec);
    CHECK(s.p1.size() == 100);
    CHECK(s.p2.size() == 300);
    CHECK(s.p3.size() == 100);
    CHECK(s.p2[0] == 100.0);
    CHECK(s.p3[99] == 499.0);
  }

  TEST_CASE("explicit segmentation is a partition of the cutting region") {
    Rng rng(61);
    for (int t = 0; t < 500; ++t) {
      std::uniform_int_distribution<Eigen::Index> len(10, 2000);
      const Eigen::Index n = len(rng);
      std::uniform_int_distribution<Eigen::Index> pos(0, n);
      std::array<Eigen::Index, 4> b{};
      do {
        for (auto& v : b) v = pos(rng);
        std::sort(b.begin(), b.end());
      } while (!(b[0] < b[1] && b[1] < b[2] && b[2] < b[3]));
      SegmentationSpec spec;
      spec.boundaries = b;
      const Segments s = segment(random_series(rng, n), spec);
      REQUIRE(s.p1.size() + s.p2.size() + s.p3.size() == b[3] - b[0]);
    }
  }

  TEST_CASE("bad explicit boundaries") {
    SegmentationSpec spec;
    spec.boundaries = {0, 100, 100, 500};
    CHECK(code_of([&] { segment(Series::Zero(600), spec); }) == ErrorCode::kInvalidArgument);
    spec.boundaries = {0, 100, 400, 601};
    CHECK(code_of([&] { segment(Series::Zero(600), spec); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { segment(Series::Zero(2), spec); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("threshold mode finds trapezoid knees within two samples") {
    Rng rng(62);
    for (double sigma : {0.0, 0.05}) {
      for (int t = 0; t < 20; ++t) {
        std::uniform_int_distribution<Eigen::Index> rise(30, 120), flat(150, 500), fall(30, 120);
        const auto tz = trapezoid(40, rise(rng), flat(rng), fall(rng), 10.0, sigma, rng);
        SegmentationSpec spec;
        spec.mode = SegmentationSpec::Mode::kThreshold;
        spec.entry_threshold = 1.0;
        spec.exit_threshold = 1.0;
        spec.min_plateau_len = 50;
        const Segments s = segment(tz.x, spec);
        CHECK(std::abs(s.bounds[1] - tz.rise_end) <= 2);
        CHECK(std::abs(s.bounds[2] - tz.fall_start) <= 2);
        CHECK(s.p2.size() == s.bounds[2] - s.bounds[1]);
        CHECK(tz.x[s.bounds[0]] > 1.0);
        CHECK(tz.x[s.bounds[3] - 1] > 1.0);
      }
    }
  }

  TEST_CASE("threshold mode failures") {
    SegmentationSpec spec;
    spec.mode = SegmentationSpec::Mode::kThreshold;
    spec.entry_threshold = 1.0;
    spec.exit_threshold = 1.0;
    CHECK(code_of([&] { segment(Series::Zero(500), spec); }) == ErrorCode::kNoCuttingDetected);
    Rng rng(63);
    spec.min_plateau_len = 10000;
    CHECK(code_of([&] { segment(trapezoid(20, 30, 100, 30, 10.0, 0.0, rng).x, spec); }) ==
          ErrorCode::kDegenerateSegment);
    spec.entry_threshold = -1.0;
    CHECK(code_of([&] { segment(Series::Ones(50), spec); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("wear interpolation examples") {
    const auto w = interpolate_wear({{1, 0.0}, {4, 0.11}}, {1, 2, 3, 4});
    CHECK(std::abs(w[1].flank_wear_mm - 0.0367) <= 0.0001);
    CHECK(std::abs(w[2].flank_wear_mm - 0.0733) <= 0.0001);
    CHECK(w[1].interpolated);
    CHECK_FALSE(w[0].interpolated);
    const auto six = interpolate_wear({{5, 0.155}, {8, 0.29}}, {6});
    CHECK(six[0].flank_wear_mm == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("wear interpolation against a two-point line") {
    Rng rng(64);
    std::uniform_real_distribution<double> wear(0.0, 0.6);
    for (int t = 0; t < 200; ++t) {
      std::vector<std::pair<int, double>> known;
      int run = 1;
      for (int k = 0; k < 5; ++k) {
        known.emplace_back(run, wear(rng));
        run += 1 + static_cast<int>(rng() % 4);
      }
      std::vector<int> all;
      for (int r = 0; r <= run + 2; ++r) all.push_back(r);
      for (const auto& rec : interpolate_wear(known, all)) {
        const auto hi = std::find_if(known.begin(), known.end(),
                                     [&](const auto& p) { return p.first >= rec.run; });
        if (hi == known.begin() || hi == known.end()) {
          const double flat = hi == known.begin() ? known.front().second : known.back().second;
          CHECK(rec.extrapolated == (hi == known.begin() ? rec.run < known.front().first : true));
          CHECK(rec.flank_wear_mm == flat);
          continue;
        }
        if (hi->first == rec.run) {
          CHECK(rec.flank_wear_mm == hi->second);
          CHECK_FALSE(rec.interpolated);
          continue;
        }
        const auto lo = std::prev(hi);
        const double x0 = lo->first, y0 = lo->second, x1 = hi->first, y1 = hi->second;
        const double line = y0 + (y1 - y0) * (rec.run - x0) / (x1 - x0);
        CHECK(std::abs(rec.flank_wear_mm - line) <= 1e-9);
        CHECK(rec.interpolated);
        CHECK_FALSE(rec.extrapolated);
      }
    }
  }

  TEST_CASE("wear interpolation edge cases") {
    const auto id = interpolate_wear({{1, 0.1}, {2, 0.2}, {3, 0.3}}, {1, 2, 3});
    for (const auto& r : id) CHECK_FALSE(r.interpolated);
    CHECK(code_of([] { interpolate_wear({{1, 0.1}}, {1}); }) == ErrorCode::kInsufficientPoints);
    CHECK(code_of([] { interpolate_wear({{3, 0.1}, {1, 0.2}}, {2}); }) ==
          ErrorCode::kInvalidArgument);
  }

  TEST_CASE("fixture ingest gives 42 entries with wear metadata") {
    const FixtureSpec f = load_fixture_spec(fixture_dir());
    CHECK(f.runs.size() == 14);
    const IngestResult r = ingest_fixture(fixture_dir(), f);
    REQUIRE(r.manifest.entries.size() == 42);
    for (const auto& e : r.manifest.entries) {
      CHECK(e.sensor == "spindle_current");
      CHECK(e.unit == "A");
      CHECK((e.state_label == "P1" || e.state_label == "P2" || e.state_label == "P3"));
      CHECK(e.metadata.count("flank_wear_mm") == 1);
    }
    const Ptog g = build_ptog(r);
    CHECK(g.vertex_count() == 42);
    CHECK(g.run_metadata(RunId{5}).at("flank_wear_mm") == doctest::Approx(0.155));
    CHECK(g.run_metadata(RunId{5}).at("flank_wear_interpolated") == 1.0);
    CHECK(g.run_metadata(RunId{14}).at("flank_wear_mm") == 0.45);
    CHECK(enumerate_epochs(g, 4).size() == 30);
  }

  TEST_CASE("ingest is idempotent") {
    const FixtureSpec f = load_fixture_spec(fixture_dir());
    const auto a = scratch_dir("ingest_a"), b = scratch_dir("ingest_b");
    write_ingest(ingest_fixture(fixture_dir(), f), a);
    write_ingest(ingest_fixture(fixture_dir(), f), b);
    CHECK(read_text(a / "manifest.json") == read_text(b / "manifest.json"));
    CHECK(read_text(a / "segments" / "run_9_P2.csv") == read_text(b / "segments" / "run_9_P2.csv"));
    // The written manifest builds the same graph as the in-memory path.
    CHECK(build_ptog(a / "manifest.json") == build_ptog(ingest_fixture(fixture_dir(), f)));
  }

  TEST_CASE("missing run file") {
    const auto dir = copy_fixture("missing_run7");
    std::filesystem::remove(dir / "run_7.csv");
    const FixtureSpec f = load_fixture_spec(dir);
    CHECK(code_of([&] { ingest_fixture(dir, f); }) == ErrorCode::kMissingSeriesFile);
    CHECK(code_of([] { load_fixture_spec("/nonexistent/fixture"); }) == ErrorCode::kIoError);
  }

  TEST_CASE("single-run fixture is valid and has no epochs") {
    const auto dir = scratch_dir("one_run");
    std::filesystem::copy_file(fixture_dir() / "run_1.csv", dir / "run_1.csv");
    auto j = nlohmann::json::parse(read_text(fixture_dir() / "fixture.json"));
    j.erase("runs");
    j["wear_points"] = nlohmann::json::array();
    auto bounds = j["segmentation"]["boundaries"]["1"];
    j["segmentation"]["boundaries"] = {{"1", bounds}};
    std::ofstream(dir / "fixture.json") << j.dump();
    const FixtureSpec f = load_fixture_spec(dir);
    CHECK(f.runs == std::vector<int>{1});
    const IngestResult r = ingest_fixture(dir, f);
    CHECK(r.manifest.entries.size() == 3);
    CHECK(enumerate_epochs(build_ptog(r), 1).empty());
  }

  TEST_CASE("threshold-mode fixture") {
    const auto dir = copy_fixture("threshold_fixture");
    auto j = nlohmann::json::parse(read_text(dir / "fixture.json"));
    j["segmentation"] = {{"mode", "threshold"},
                         {"entry_threshold", 1.5},
                         {"exit_threshold", 1.5},
                         {"min_plateau_len", 100}};
    std::ofstream(dir / "fixture.json") << j.dump();
    const FixtureSpec f = load_fixture_spec(dir);
    CHECK(f.mode == SegmentationSpec::Mode::kThreshold);
    const IngestResult r = ingest_fixture(dir, f);
    CHECK(r.manifest.entries.size() == 42);
    // The fixture ramps are curved, so a straight-ramp fit puts the knees a
    // little outside the annotated plateau.
    const auto shipped = nlohmann::json::parse(read_text(fixture_dir() / "fixture.json"));
    const Ptog g = build_ptog(r);
    for (int run = 1; run <= 14; ++run) {
      const auto b = shipped["segmentation"]["boundaries"][std::to_string(run)];
      const double plateau = b[2].get<double>() - b[1].get<double>();
      const auto* p2 = g.get_series(RunId{run}, *g.find_state("P2"));
      REQUIRE(p2 != nullptr);
      const auto n = static_cast<double>(p2->samples.size());
      CHECK(n >= plateau - 2.0);
      CHECK(n <= 1.15 * plateau);
    }
  }
}
