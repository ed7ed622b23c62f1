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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gendt/config.hpp"
#include "gendt/ensemble.hpp"
#include "gendt/forecast.hpp"
#include "gendt/ptog.hpp"
#include "gendt/windowing.hpp"

namespace gendt {

/// Ordered: Continue < Warning < Stop.
enum class ControlDecision { kContinue = 0, kWarning = 1, kStop = 2 };
enum class Health { kPass, kFail };

std::string_view to_string(ControlDecision d);
std::string_view to_string(Health h);

struct HealthVerdict {
  Health value = Health::kPass;
  double cumulative = 0.0;
};

/// Continue below t_low, Warning on the closed band [t_low, t_high], Stop
/// above t_high. Throws kNonFiniteQ for NaN/inf or negative q.
ControlDecision decide(double q, const ControlThresholds& th);

/// cumulative = prior + q; Fail iff cumulative > t_health.
HealthVerdict accumulate_health(double prior, double q, const ControlThresholds& th);

struct EpochTiming {
  double window_ms = 0.0;
  double forecast_ms = 0.0;
  double total_ms = 0.0;
};

struct EpochReport {
  EpochPoint epoch;
  std::vector<int> history_runs;
  int downsample_factor = 1;
  Eigen::Index horizon = 0;
  int attempts_total = 0;
  int attempts_used = 0;
  Series median;
  Series sd;
  std::optional<Series> truth;    // O_c, preprocessed and quantised like a forecast
  std::vector<double> attempt_rmse;  // per successful attempt, vs truth
  std::optional<double> q_rmse;
  std::optional<double> err_avg;
  std::optional<double> err_std;
  std::optional<ControlDecision> decision;  // unset: no action
  double cumulative_rmse = 0.0;
  Health health = Health::kPass;
  bool failed = false;
  std::string error;
  std::vector<std::string> flags;
  EpochTiming timing;

  bool evaluated() const { return q_rmse.has_value(); }
};

/// Backend for a run configuration: the mock seed falls back to
/// config.rng_seed and the oracle resolves downsampling per series rate.
std::unique_ptr<Forecaster> make_backend(const RunConfig& config, const Ptog& ptog);

/// Everything in run_epoch except the health fold: extract the window,
/// preprocess, encode, run the ensemble, aggregate, then (only afterwards)
/// look up the truth and score it. Ensemble failures and missing history
/// are recorded in the report; kAuthError and config errors propagate.
EpochReport forecast_epoch(const Ptog& ptog, const EpochPoint& epoch, const RunConfig& config,
                           const Forecaster& backend, int max_in_flight);

/// Folds one epoch's RMSE into the running total and stamps the verdict.
void apply_health(EpochReport& report, double& cumulative, const ControlThresholds& th);

/// One epoch of the control loop with a running health total.
EpochReport run_epoch(const Ptog& ptog, const EpochPoint& epoch, const RunConfig& config,
                      const Forecaster& backend, double& cumulative);

struct RunSummary {
  int run = 0;
  std::optional<double> flank_wear_mm;
  bool wear_interpolated = false;
  int epochs = 0;
  double err_avg = 0.0;  // pooled over every sample of the run's epochs
  double err_std = 0.0;
  double rmse_mean = 0.0;
};

struct SessionReport {
  RunConfig config;
  std::vector<EpochReport> epochs;
  std::vector<RunSummary> runs;
  double cumulative_rmse = 0.0;
  Health health = Health::kPass;
  double mean_rmse = 0.0;
  int failed_epochs = 0;
  std::optional<EpochPoint> halted_at;
  std::string generated_at;
};

struct ReplayOptions {
  bool reproducible = false;
};

/// Replays every epoch of enumerate_epochs(ptog, config.min_history).
/// Forecasts run in parallel (config.max_in_flight epochs at a time); the
/// health fold is sequential in epoch order. With halt_on_stop the loop runs
/// sequentially and ends at the first Stop.
SessionReport replay(const Ptog& ptog, const RunConfig& config, const Forecaster& backend,
                     const ReplayOptions& options = {});

/// Per-run pooled Err_avg/Err_std over the evaluated epochs.
std::vector<RunSummary> summarize_runs(const Ptog& ptog, const std::vector<EpochReport>& epochs);

}  // namespace gendt
