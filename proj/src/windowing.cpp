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

#include "gendt/windowing.hpp"

#include <algorithm>
#include <string>

#include "gendt/error.hpp"

namespace gendt {

std::vector<EpochPoint> enumerate_epochs(const Ptog& ptog, int min_history) {
  if (min_history < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_history must be >= 1");
  }
  std::vector<EpochPoint> out;
  std::vector<int> seen(ptog.states().size(), 0);
  for (const auto& run : ptog.runs()) {
    for (std::size_t s = 0; s < ptog.states().size(); ++s) {
      const StateId& state = ptog.states()[s];
      if (!ptog.contains(run, state)) continue;
      if (seen[s] >= min_history) out.push_back({run, state});
      ++seen[s];
    }
  }
  return out;
}

ObservationWindow extract_window(const Ptog& ptog, const EpochPoint& epoch, int depth) {
  if (depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "history depth must be >= 1");
  }
  const SensorId* sensor = ptog.sensor_for(epoch.state);
  if (sensor == nullptr) {
    throw Error(ErrorCode::kNoHistory, "state " + epoch.state.label + " is not in the graph");
  }

  ObservationWindow window;
  window.state = *ptog.find_state(epoch.state.index);
  window.sensor = *sensor;
  window.history_depth = depth;

  const auto& runs = ptog.runs();
  auto it = std::lower_bound(runs.begin(), runs.end(), epoch.run);
  while (it != runs.begin() && static_cast<int>(window.history.size()) < depth) {
    --it;
    if (const MeasurementSeries* s = ptog.get_series(*it, epoch.state)) {
      window.history.push_back(*s);
    }
  }
  if (window.history.empty()) {
    throw Error(ErrorCode::kNoHistory,
                "no run before " + std::to_string(epoch.run.index) + " contains " +
                    epoch.state.label);
  }
  std::reverse(window.history.begin(), window.history.end());
  return window;
}

}  // namespace gendt
