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

#include <vector>

#include "gendt/ptog.hpp"

namespace gendt {

struct EpochPoint {
  RunId run;
  StateId state;

  friend bool operator==(const EpochPoint& a, const EpochPoint& b) {
    return a.run == b.run && a.state == b.state;
  }
};

/// Same state's series from prior runs, oldest first. Never contains the
/// target run.
struct ObservationWindow {
  StateId state;
  SensorId sensor;
  std::vector<MeasurementSeries> history;
  int history_depth = 0;

  /// Fewer prior runs were available than requested.
  bool short_history() const {
    return static_cast<int>(history.size()) < history_depth;
  }
};

/// All vertices with at least `min_history` earlier runs holding the same
/// state, ordered by (run, state index).
std::vector<EpochPoint> enumerate_epochs(const Ptog& ptog, int min_history);

/// Walks backward from the run before `epoch.run`, gathering up to `depth`
/// series of `epoch.state`. Throws kNoHistory when no prior run has it.
/// The epoch itself need not be a vertex (a forecast may precede its truth).
ObservationWindow extract_window(const Ptog& ptog, const EpochPoint& epoch, int depth);

}  // namespace gendt
