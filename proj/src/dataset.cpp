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

#include "gendt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

#include "gendt/error.hpp"
#include "json_util.hpp"

namespace gendt {

using detail::json;

namespace {

constexpr Eigen::Index kSustain = 3;

// Residual sum of squares of a least-squares line (or constant) over x[a, b).
double sse(const Series& x, Eigen::Index a, Eigen::Index b, bool linear) {
  const Eigen::Index n = b - a;
  if (n <= 0) return 0.0;
  const auto seg = x.segment(a, n).array();
  const double mean = seg.mean();
  if (!linear || n < 3) return (seg - mean).square().sum();
  const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  const Eigen::ArrayXd tc = t - t.mean();
  const double slope = (tc * (seg - mean)).sum() / tc.square().sum();
  return ((seg - mean) - slope * tc).square().sum();
}

bool all_above(const Series& x, Eigen::Index from, Eigen::Index len, double level) {
  return (x.segment(from, len).array() > level).all();
}

Segments slice(const Series& x, const SegmentBounds& b) {
  Segments s;
  s.bounds = b;
  s.p1 = x.segment(b[0], b[1] - b[0]);
  s.p2 = x.segment(b[1], b[2] - b[1]);
  s.p3 = x.segment(b[2], b[3] - b[2]);
  return s;
}

}  // namespace

Segments segment(const Series& x, const SegmentationSpec& spec) {
  if (x.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "run series needs at least 3 samples");
  }
  if (spec.mode == SegmentationSpec::Mode::kExplicit) {
    const auto& b = spec.boundaries;
    if (!(b[0] >= 0 && b[0] < b[1] && b[1] < b[2] && b[2] < b[3] && b[3] <= x.size())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "explicit boundaries must be strictly increasing within the series");
    }
    return slice(x, b);
  }

  if (!(spec.entry_threshold > 0.0) || !(spec.exit_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "thresholds must be positive");
  }
  const Eigen::Index sustain = std::min<Eigen::Index>(kSustain, x.size());
  Eigen::Index start = -1;
  for (Eigen::Index i = 0; i + sustain <= x.size(); ++i) {
    if (all_above(x, i, sustain, spec.entry_threshold)) {
      start = i;
      break;
    }
  }
  Eigen::Index end = -1;
  for (Eigen::Index j = x.size() - sustain; j >= 0; --j) {
    if (all_above(x, j, sustain, spec.exit_threshold)) {
      end = j + sustain;
      break;
    }
  }
  if (start < 0 || end < 0 || end - start < 3) {
    throw Error(ErrorCode::kNoCuttingDetected, "signal never rises above the entry threshold");
  }

  // The plateau is assumed to cover the middle of the cutting region.
  const Eigen::Index mid = start + (end - start) / 2;
  Eigen::Index p1_end = start + 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = start + 1; k <= mid; ++k) {
    const double cost = sse(x, start, k, true) + sse(x, k, mid + 1, false);
    if (cost < best) {
      best = cost;
      p1_end = k;
    }
  }
  Eigen::Index p2_end = end - 1;
  best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = mid + 1; k < end; ++k) {
    const double cost = sse(x, mid, k, false) + sse(x, k, end, true);
    if (cost < best) {
      best = cost;
      p2_end = k;
    }
  }
  if (!(start < p1_end && p1_end < p2_end && p2_end < end)) {
    throw Error(ErrorCode::kDegenerateSegment, "a process state would be empty");
  }
  if (p2_end - p1_end < spec.min_plateau_len) {
    throw Error(ErrorCode::kDegenerateSegment,
                "plateau of " + std::to_string(p2_end - p1_end) + " samples is shorter than " +
                    std::to_string(spec.min_plateau_len));
  }
  return slice(x, {start, p1_end, p2_end, end});
}

std::vector<WearRecord> interpolate_wear(const std::vector<std::pair<int, double>>& known,
                                         const std::vector<int>& runs) {
  if (known.size() < 2) {
    throw Error(ErrorCode::kInsufficientPoints, "wear interpolation needs two measured runs");
  }
  for (std::size_t i = 1; i < known.size(); ++i) {
    if (known[i].first <= known[i - 1].first) {
      throw Error(ErrorCode::kInvalidArgument, "measured wear must be sorted by run");
    }
  }
  std::vector<WearRecord> out;
  out.reserve(runs.size());
  for (int run : runs) {
    WearRecord rec;
    rec.run = run;
    auto hi = std::lower_bound(known.begin(), known.end(), run,
                               [](const auto& p, int r) { return p.first < r; });
    if (hi != known.end() && hi->first == run) {
      rec.flank_wear_mm = hi->second;
    } else if (hi == known.begin()) {
      rec.flank_wear_mm = known.front().second;
      rec.interpolated = rec.extrapolated = true;
    } else if (hi == known.end()) {
      rec.flank_wear_mm = known.back().second;
      rec.interpolated = rec.extrapolated = true;
    } else {
      const auto lo = std::prev(hi);
      const double t = static_cast<double>(run - lo->first) / (hi->first - lo->first);
      rec.flank_wear_mm = lo->second + t * (hi->second - lo->second);
      rec.interpolated = true;
    }
    out.push_back(rec);
  }
  return out;
}

FixtureSpec load_fixture_spec(const std::filesystem::path& dir) {
  const auto path = dir / "fixture.json";
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "fixture directory not found: " + dir.string());
  }
  json j;
  try {
    j = json::parse(detail::read_file(path.string()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  try {
    FixtureSpec f;
    f.sample_rate_hz = detail::require<double>(j, "sample_rate_hz");
    f.sensor = detail::value_or<std::string>(j, "sensor", f.sensor);
    f.unit = detail::value_or<std::string>(j, "unit", f.unit);
    const json& seg = j.at("segmentation");
    const auto mode = detail::value_or<std::string>(seg, "mode", "explicit");
    if (mode == "explicit") {
      f.mode = SegmentationSpec::Mode::kExplicit;
      for (const auto& [run, b] : seg.at("boundaries").items()) {
        f.boundaries[std::stoi(run)] = b.get<SegmentBounds>();
      }
    } else if (mode == "threshold") {
      f.mode = SegmentationSpec::Mode::kThreshold;
      f.threshold.mode = SegmentationSpec::Mode::kThreshold;
      f.threshold.entry_threshold = detail::require<double>(seg, "entry_threshold");
      f.threshold.exit_threshold = detail::require<double>(seg, "exit_threshold");
      f.threshold.min_plateau_len = detail::value_or(seg, "min_plateau_len", 1);
    } else {
      throw Error(ErrorCode::kParseError, "unknown segmentation mode '" + mode + "'");
    }
    if (j.contains("runs")) {
      f.runs = j["runs"].get<std::vector<int>>();
    } else {
      static const std::regex kRunFile(R"(run_(\d+)\.csv)");
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, kRunFile)) f.runs.push_back(std::stoi(m[1]));
      }
    }
    std::sort(f.runs.begin(), f.runs.end());
    if (j.contains("wear_points")) {
      for (const auto& p : j["wear_points"]) {
        f.wear_points.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
      }
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

IngestResult ingest_fixture(const std::filesystem::path& dir, const FixtureSpec& fixture) {
  std::map<int, WearRecord> wear;
  if (fixture.wear_points.size() >= 2) {
    for (const auto& w : interpolate_wear(fixture.wear_points, fixture.runs)) wear[w.run] = w;
  }
  static constexpr const char* kLabels[3] = {"P1", "P2", "P3"};

  IngestResult result;
  for (int run : fixture.runs) {
    const auto csv = dir / ("run_" + std::to_string(run) + ".csv");
    if (!std::filesystem::exists(csv)) {
      throw Error(ErrorCode::kMissingSeriesFile, "missing " + csv.string());
    }
    const std::vector<double> raw = read_sample_csv(csv);
    const Series x = Eigen::Map<const Series>(raw.data(), static_cast<Eigen::Index>(raw.size()));

    SegmentationSpec spec = fixture.threshold;
    spec.mode = fixture.mode;
    if (fixture.mode == SegmentationSpec::Mode::kExplicit) {
      auto it = fixture.boundaries.find(run);
      if (it == fixture.boundaries.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no segment boundaries for run " + std::to_string(run));
      }
      spec.boundaries = it->second;
    }
    const Segments seg = segment(x, spec);
    const Series* parts[3] = {&seg.p1, &seg.p2, &seg.p3};

    std::map<std::string, double> meta;
    if (auto it = wear.find(run); it != wear.end()) {
      meta["flank_wear_mm"] = it->second.flank_wear_mm;
      meta["flank_wear_interpolated"] = it->second.interpolated ? 1.0 : 0.0;
      meta["flank_wear_extrapolated"] = it->second.extrapolated ? 1.0 : 0.0;
    }
    for (int s = 0; s < 3; ++s) {
      ManifestEntry e;
      e.run = run;
      e.state_label = kLabels[s];
      e.state_index = s + 1;
      e.sensor = fixture.sensor;
      e.unit = fixture.unit;
      e.sample_rate_hz = fixture.sample_rate_hz;
      e.csv_path = "segments/run_" + std::to_string(run) + "_" + kLabels[s] + ".csv";
      e.metadata = meta;
      result.segment_files[e.csv_path] =
          std::vector<double>(parts[s]->data(), parts[s]->data() + parts[s]->size());
      result.manifest.entries.push_back(std::move(e));
    }
  }
  return result;
}

std::filesystem::path write_ingest(const IngestResult& result,
                                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "segments");
  for (const auto& [rel, samples] : result.segment_files) {
    write_sample_csv(out_dir / rel, samples);
  }
  const auto manifest_path = out_dir / "manifest.json";
  save_manifest(result.manifest, manifest_path);
  return manifest_path;
}

Ptog build_ptog(const IngestResult& result) {
  return build_ptog(result.manifest, [&](const std::string& rel) {
    auto it = result.segment_files.find(rel);
    if (it == result.segment_files.end()) {
      throw Error(ErrorCode::kMissingSeriesFile, "no segment data for " + rel);
    }
    return it->second;
  });
}

}  // namespace gendt
