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

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gendt/ptog.hpp"
#include "gendt/types.hpp"

namespace gendt {

/// [start, p1_end, p2_end, end) sample indices of one run.
using SegmentBounds = std::array<Eigen::Index, 4>;

struct SegmentationSpec {
  enum class Mode { kExplicit, kThreshold };
  Mode mode = Mode::kExplicit;
  SegmentBounds boundaries{};  // explicit mode
  double entry_threshold = 0.0;
  double exit_threshold = 0.0;
  int min_plateau_len = 1;
};

struct Segments {
  SegmentBounds bounds{};
  Series p1, p2, p3;
};

/// Splits one run into entry / stable cut / exit. Threshold mode takes the
/// cutting region from the first sustained rise above entry_threshold to the
/// last sustained sample above exit_threshold, then places the plateau knees
/// by least-squares fits of ramp+constant (left half) and constant+ramp
/// (right half). Throws kNoCuttingDetected or kDegenerateSegment.
Segments segment(const Series& run_series, const SegmentationSpec& spec);

struct WearRecord {
  int run = 0;
  double flank_wear_mm = 0.0;
  bool interpolated = false;  // not a measured value
  bool extrapolated = false;  // outside the measured span, held flat
};

/// Linear interpolation between measured neighbours for every run in `runs`.
/// `known` must be sorted by run. Throws kInsufficientPoints with < 2 points.
std::vector<WearRecord> interpolate_wear(const std::vector<std::pair<int, double>>& known,
                                         const std::vector<int>& runs);

/// Contents of <fixture>/fixture.json.
struct FixtureSpec {
  double sample_rate_hz = 0.0;
  std::string sensor = "spindle_current";
  std::string unit = "A";
  std::vector<int> runs;
  SegmentationSpec::Mode mode = SegmentationSpec::Mode::kExplicit;
  std::map<int, SegmentBounds> boundaries;
  SegmentationSpec threshold;  // threshold-mode parameters
  std::vector<std::pair<int, double>> wear_points;
};

FixtureSpec load_fixture_spec(const std::filesystem::path& dir);

struct IngestResult {
  Manifest manifest;
  // Segment samples keyed by the manifest's relative csv_path.
  std::map<std::string, std::vector<double>> segment_files;
};

/// Reads run_<k>.csv for every fixture run, segments each into P1/P2/P3
/// and attaches wear metadata. Nothing is written. Throws kMissingSeriesFile.
IngestResult ingest_fixture(const std::filesystem::path& dir, const FixtureSpec& fixture);

/// Writes the segment CSVs and manifest.json under `out_dir`; returns the
/// manifest path.
std::filesystem::path write_ingest(const IngestResult& result,
                                   const std::filesystem::path& out_dir);

/// Builds a graph straight from in-memory ingest output.
Ptog build_ptog(const IngestResult& result);

}  // namespace gendt
