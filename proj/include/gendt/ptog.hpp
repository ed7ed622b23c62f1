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

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gendt/types.hpp"

namespace gendt {

struct MeasurementSeries {
  RunId run;
  StateId state;
  SensorId sensor;
  double sample_rate_hz = 0.0;
  Series samples;

  Eigen::Index length() const { return samples.size(); }

  friend bool operator==(const MeasurementSeries& a,
                         const MeasurementSeries& b) {
    return a.run == b.run && a.state == b.state &&
           a.state.label == b.state.label && a.sensor == b.sensor &&
           a.sample_rate_hz == b.sample_rate_hz &&
           a.samples.size() == b.samples.size() && a.samples == b.samples;
  }
};

/// One line of a dataset manifest. `csv_path` is resolved relative to the
/// manifest's directory when the manifest is read from disk.
struct ManifestEntry {
  int run = 0;
  std::string state_label;
  std::optional<int> state_index;
  std::string sensor;
  std::string unit;
  double sample_rate_hz = 0.0;
  std::string csv_path;
  std::map<std::string, double> metadata;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// Physical twin observation graph: vertices are (run, state) pairs, each
/// carrying the series recorded by the state's sensor. Edges are implicit;
/// see edges().
class Ptog {
 public:
  using VertexKey = std::pair<int, int>;  // (run index, state index)

  enum class EdgeKind { kSuccession, kAlignment };

  struct Edge {
    VertexKey from;
    VertexKey to;
    EdgeKind kind;
  };

  void add_run(RunId run);

  /// Validates and inserts a series. Throws kDuplicateVertex,
  /// kNonFiniteSample, kSensorMismatch or kInvalidArgument.
  void add_series(MeasurementSeries series);

  void set_run_metadata(RunId run, const std::string& key, double value);

  /// Strictly increasing run order.
  const std::vector<RunId>& runs() const { return runs_; }
  /// Ordered by state index.
  const std::vector<StateId>& states() const { return states_; }

  std::optional<StateId> find_state(std::string_view label) const;
  std::optional<StateId> find_state(int index) const;
  const SensorId* sensor_for(const StateId& state) const;

  /// nullptr when the run lacks the state (absence is not an error).
  const MeasurementSeries* get_series(RunId run, const StateId& state) const;
  bool contains(RunId run, const StateId& state) const {
    return get_series(run, state) != nullptr;
  }

  std::size_t vertex_count() const { return series_.size(); }
  const std::map<VertexKey, MeasurementSeries>& series() const {
    return series_;
  }

  /// Intra-run succession (consecutive present states of one run) and
  /// cross-run alignment (consecutive runs holding the same state).
  std::vector<Edge> edges() const;

  const std::map<std::string, double>& run_metadata(RunId run) const;

  friend bool operator==(const Ptog& a, const Ptog& b);

 private:
  std::vector<RunId> runs_;
  std::vector<StateId> states_;
  std::map<int, SensorId> sensors_;
  std::map<VertexKey, MeasurementSeries> series_;
  std::map<int, std::map<std::string, double>> metadata_;
};

inline constexpr int kPtogSchemaVersion = 1;

using SeriesLoader = std::function<std::vector<double>(const std::string&)>;

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);
std::string manifest_to_string(const Manifest& manifest);

/// Builds a graph from manifest entries, fetching samples through `loader`.
Ptog build_ptog(const Manifest& manifest, const SeriesLoader& loader);
/// Reads the manifest and its CSVs (paths relative to the manifest file).
Ptog build_ptog(const std::filesystem::path& manifest_path);

std::string ptog_to_string(const Ptog& ptog);
Ptog ptog_from_string(std::string_view text);
void save_ptog(const Ptog& ptog, const std::filesystem::path& path);
Ptog load_ptog(const std::filesystem::path& path);

// Single-column, header-less decimal sample files.
std::vector<double> read_sample_csv(const std::filesystem::path& path);
void write_sample_csv(const std::filesystem::path& path,
                      const std::vector<double>& samples);

}  // namespace gendt
