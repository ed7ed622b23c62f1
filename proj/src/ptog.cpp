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

#include "gendt/ptog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gendt/error.hpp"
#include "json_util.hpp"

namespace gendt {

using detail::json;

namespace {

std::string vertex_name(int run, const std::string& label) {
  return "(run " + std::to_string(run) + ", " + label + ")";
}

}  // namespace

void Ptog::add_run(RunId run) {
  if (run.index < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "run index must be positive, got " + std::to_string(run.index));
  }
  auto it = std::lower_bound(runs_.begin(), runs_.end(), run);
  if (it == runs_.end() || *it != run) runs_.insert(it, run);
}

void Ptog::add_series(MeasurementSeries series) {
  const std::string where = vertex_name(series.run.index, series.state.label);
  if (series.state.index < 1 || series.state.label.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid state for " + where);
  }
  if (!(series.sample_rate_hz > 0.0) || !std::isfinite(series.sample_rate_hz)) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive for " + where);
  }
  if (series.samples.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty series for " + where);
  }
  if (!series.samples.allFinite()) {
    throw Error(ErrorCode::kNonFiniteSample, "non-finite sample in " + where);
  }

  // State identity: index and label must agree with what is already known.
  auto same_index = std::find_if(states_.begin(), states_.end(), [&](const StateId& s) {
    return s.index == series.state.index;
  });
  auto same_label = std::find_if(states_.begin(), states_.end(), [&](const StateId& s) {
    return s.label == series.state.label;
  });
  if (same_index != same_label) {
    throw Error(ErrorCode::kInvalidArgument,
                "state label/index conflict for " + where);
  }

  auto sensor = sensors_.find(series.state.index);
  if (sensor != sensors_.end() && !(sensor->second == series.sensor)) {
    throw Error(ErrorCode::kSensorMismatch,
                "state " + series.state.label + " already monitored by '" +
                    sensor->second.name + "', got '" + series.sensor.name + "'");
  }

  VertexKey key{series.run.index, series.state.index};
  if (series_.count(key) != 0) {
    throw Error(ErrorCode::kDuplicateVertex, "duplicate vertex " + where);
  }

  add_run(series.run);
  if (same_index == states_.end()) {
    auto pos = std::lower_bound(states_.begin(), states_.end(), series.state);
    states_.insert(pos, StateId{series.state.index, series.state.label});
  }
  sensors_.emplace(series.state.index, series.sensor);
  series_.emplace(key, std::move(series));
}

void Ptog::set_run_metadata(RunId run, const std::string& key, double value) {
  add_run(run);
  metadata_[run.index][key] = value;
}

std::optional<StateId> Ptog::find_state(std::string_view label) const {
  for (const auto& s : states_) {
    if (s.label == label) return s;
  }
  return std::nullopt;
}

std::optional<StateId> Ptog::find_state(int index) const {
  for (const auto& s : states_) {
    if (s.index == index) return s;
  }
  return std::nullopt;
}

const SensorId* Ptog::sensor_for(const StateId& state) const {
  auto it = sensors_.find(state.index);
  return it == sensors_.end() ? nullptr : &it->second;
}

const MeasurementSeries* Ptog::get_series(RunId run, const StateId& state) const {
  auto it = series_.find(VertexKey{run.index, state.index});
  return it == series_.end() ? nullptr : &it->second;
}

std::vector<Ptog::Edge> Ptog::edges() const {
  std::vector<Edge> out;
  // series_ is ordered by (run, state), so neighbours in iteration order
  // within one run are successive states.
  const VertexKey* prev = nullptr;
  for (const auto& [key, s] : series_) {
    if (prev != nullptr && prev->first == key.first) {
      out.push_back({*prev, key, EdgeKind::kSuccession});
    }
    prev = &key;
  }
  for (const auto& state : states_) {
    std::optional<VertexKey> last;
    for (const auto& run : runs_) {
      VertexKey key{run.index, state.index};
      if (series_.count(key) == 0) continue;
      if (last) out.push_back({*last, key, EdgeKind::kAlignment});
      last = key;
    }
  }
  return out;
}

const std::map<std::string, double>& Ptog::run_metadata(RunId run) const {
  static const std::map<std::string, double> kEmpty;
  auto it = metadata_.find(run.index);
  return it == metadata_.end() ? kEmpty : it->second;
}

bool operator==(const Ptog& a, const Ptog& b) {
  if (a.runs_ != b.runs_ || a.states_.size() != b.states_.size() ||
      a.sensors_ != b.sensors_ || a.series_ != b.series_ ||
      a.metadata_ != b.metadata_) {
    return false;
  }
  for (std::size_t i = 0; i < a.states_.size(); ++i) {
    if (a.states_[i] != b.states_[i] || a.states_[i].label != b.states_[i].label) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::optional<int> trailing_index(const std::string& label) {
  std::size_t pos = label.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(label[pos - 1]))) --pos;
  if (pos == label.size()) return std::nullopt;
  int value = 0;
  auto [p, ec] = std::from_chars(label.data() + pos, label.data() + label.size(), value);
  if (ec != std::errc() || value < 1) return std::nullopt;
  return value;
}

json entry_to_json(const ManifestEntry& e) {
  json j;
  j["run"] = e.run;
  j["state_label"] = e.state_label;
  if (e.state_index) j["state_index"] = *e.state_index;
  j["sensor"] = e.sensor;
  j["unit"] = e.unit;
  j["sample_rate_hz"] = e.sample_rate_hz;
  j["csv_path"] = e.csv_path;
  j["metadata"] = json::object();
  for (const auto& [k, v] : e.metadata) j["metadata"][k] = v;
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  e.run = detail::require<int>(j, "run");
  e.state_label = detail::require<std::string>(j, "state_label");
  if (j.contains("state_index") && !j["state_index"].is_null()) {
    e.state_index = j["state_index"].get<int>();
  }
  e.sensor = detail::require<std::string>(j, "sensor");
  e.unit = detail::value_or<std::string>(j, "unit", "");
  e.sample_rate_hz = detail::require<double>(j, "sample_rate_hz");
  e.csv_path = detail::require<std::string>(j, "csv_path");
  if (j.contains("metadata")) {
    for (const auto& [k, v] : j["metadata"].items()) {
      e.metadata[k] = v.get<double>();
    }
  }
  return e;
}

}  // namespace

std::string manifest_to_string(const Manifest& manifest) {
  json j;
  j["schema_version"] = kPtogSchemaVersion;
  j["entries"] = json::array();
  for (const auto& e : manifest.entries) j["entries"].push_back(entry_to_json(e));
  return j.dump(2) + "\n";
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  detail::write_file(path.string(), manifest_to_string(manifest));
}

Manifest load_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(detail::read_file(path.string()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  // A bare array of entries is accepted as well as the wrapped form.
  const json* entries = &j;
  if (j.is_object()) {
    if (!j.contains("entries")) {
      throw Error(ErrorCode::kParseError, "manifest lacks 'entries'");
    }
    entries = &j["entries"];
  }
  if (!entries->is_array()) {
    throw Error(ErrorCode::kParseError, "manifest entries must be an array");
  }
  Manifest m;
  for (const auto& e : *entries) m.entries.push_back(entry_from_json(e));
  return m;
}

Ptog build_ptog(const Manifest& manifest, const SeriesLoader& loader) {
  // Resolve state indices: explicit, then trailing digits of the label, then
  // order of first appearance among the remaining free indices.
  std::map<std::string, int> label_index;
  std::set<int> used;
  for (const auto& e : manifest.entries) {
    std::optional<int> idx = e.state_index ? e.state_index : trailing_index(e.state_label);
    if (!idx) continue;
    auto [it, inserted] = label_index.emplace(e.state_label, *idx);
    if (!inserted && it->second != *idx) {
      throw Error(ErrorCode::kInvalidArgument,
                  "state '" + e.state_label + "' given two indices");
    }
    used.insert(*idx);
  }
  int next = 1;
  for (const auto& e : manifest.entries) {
    if (label_index.count(e.state_label) != 0) continue;
    while (used.count(next) != 0) ++next;
    label_index[e.state_label] = next;
    used.insert(next);
  }

  Ptog ptog;
  for (const auto& e : manifest.entries) {
    std::vector<double> raw = loader(e.csv_path);
    MeasurementSeries s;
    s.run = RunId{e.run};
    s.state = StateId{label_index.at(e.state_label), e.state_label};
    s.sensor = SensorId{e.sensor, e.unit};
    s.sample_rate_hz = e.sample_rate_hz;
    s.samples = Eigen::Map<const Series>(raw.data(), static_cast<Eigen::Index>(raw.size()));
    ptog.add_series(std::move(s));
    for (const auto& [k, v] : e.metadata) ptog.set_run_metadata(RunId{e.run}, k, v);
  }
  return ptog;
}

Ptog build_ptog(const std::filesystem::path& manifest_path) {
  Manifest m = load_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  return build_ptog(m, [&](const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_relative()) p = base / p;
    return read_sample_csv(p);
  });
}

// ---------------------------------------------------------------------------
// CSV

std::vector<double> read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingSeriesFile, "cannot read " + path.string());
  }
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    if (*b == '+') ++b;
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(lineno) + ": not a decimal");
    }
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteSample,
                  path.string() + ":" + std::to_string(lineno));
    }
    out.push_back(v);
  }
  return out;
}

void write_sample_csv(const std::filesystem::path& path,
                      const std::vector<double>& samples) {
  std::string text;
  for (double v : samples) {
    text += detail::format_shortest(v);
    text += '\n';
  }
  detail::write_file(path.string(), text);
}

// ---------------------------------------------------------------------------
// Persistence

std::string ptog_to_string(const Ptog& ptog) {
  json j;
  j["schema_version"] = kPtogSchemaVersion;
  j["runs"] = json::array();
  for (const auto& run : ptog.runs()) {
    json r;
    r["run"] = run.index;
    r["metadata"] = json::object();
    for (const auto& [k, v] : ptog.run_metadata(run)) r["metadata"][k] = v;
    j["runs"].push_back(std::move(r));
  }
  j["states"] = json::array();
  for (const auto& s : ptog.states()) {
    const SensorId* sensor = ptog.sensor_for(s);
    json st;
    st["index"] = s.index;
    st["label"] = s.label;
    st["sensor"] = {{"name", sensor->name}, {"unit", sensor->unit}};
    j["states"].push_back(std::move(st));
  }
  j["series"] = json::array();
  for (const auto& [key, s] : ptog.series()) {
    json e;
    e["run"] = key.first;
    e["state"] = key.second;
    e["sample_rate_hz"] = s.sample_rate_hz;
    e["samples"] = detail::to_json_array(s.samples);
    j["series"].push_back(std::move(e));
  }
  return j.dump() + "\n";
}

Ptog ptog_from_string(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") ||
      !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kPtogSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "expected schema_version " + std::to_string(kPtogSchemaVersion));
  }
  try {
    Ptog ptog;
    std::map<int, std::pair<StateId, SensorId>> states;
    for (const auto& st : j.at("states")) {
      StateId id{st.at("index").get<int>(), st.at("label").get<std::string>()};
      SensorId sensor{st.at("sensor").at("name").get<std::string>(),
                      st.at("sensor").at("unit").get<std::string>()};
      states[id.index] = {id, sensor};
    }
    for (const auto& r : j.at("runs")) {
      RunId run{r.at("run").get<int>()};
      ptog.add_run(run);
      for (const auto& [k, v] : r.at("metadata").items()) {
        ptog.set_run_metadata(run, k, v.get<double>());
      }
    }
    for (const auto& e : j.at("series")) {
      auto it = states.find(e.at("state").get<int>());
      if (it == states.end()) {
        throw Error(ErrorCode::kParseError, "series references unknown state");
      }
      MeasurementSeries s;
      s.run = RunId{e.at("run").get<int>()};
      s.state = it->second.first;
      s.sensor = it->second.second;
      s.sample_rate_hz = e.at("sample_rate_hz").get<double>();
      s.samples = detail::series_from_json(e.at("samples"));
      ptog.add_series(std::move(s));
    }
    return ptog;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

void save_ptog(const Ptog& ptog, const std::filesystem::path& path) {
  detail::write_file(path.string(), ptog_to_string(ptog));
}

Ptog load_ptog(const std::filesystem::path& path) {
  return ptog_from_string(detail::read_file(path.string()));
}

}  // namespace gendt
