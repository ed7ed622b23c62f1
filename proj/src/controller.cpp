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

#include "gendt/controller.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "gendt/codec.hpp"
#include "gendt/dsp.hpp"
#include "gendt/error.hpp"

namespace gendt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Round-trips a series through the codec so the truth sits on the same
// grid as decoded forecasts.
Series quantise(const Series& values, const EncodingSpec& spec) {
  auto decoded = decode(encode(values, spec).text, spec, values.size());
  return std::get<Decoded>(decoded).values;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(ControlDecision d) {
  switch (d) {
    case ControlDecision::kContinue: return "Continue";
    case ControlDecision::kWarning: return "Warning";
    case ControlDecision::kStop: return "Stop";
  }
  return "Unknown";
}

std::string_view to_string(Health h) { return h == Health::kPass ? "Pass" : "Fail"; }

ControlDecision decide(double q, const ControlThresholds& th) {
  if (!std::isfinite(q) || q < 0.0) {
    throw Error(ErrorCode::kNonFiniteQ, "Q_c must be finite and non-negative");
  }
  if (q < th.t_low) return ControlDecision::kContinue;
  if (q <= th.t_high) return ControlDecision::kWarning;
  return ControlDecision::kStop;
}

HealthVerdict accumulate_health(double prior, double q, const ControlThresholds& th) {
  HealthVerdict v;
  v.cumulative = prior + q;
  v.value = v.cumulative > th.t_health ? Health::kFail : Health::kPass;
  return v;
}

std::unique_ptr<Forecaster> make_backend(const RunConfig& config, const Ptog& ptog) {
  BackendConfig backend = config.backend;
  backend.rng_seed = config.resolved_backend_seed();
  const DownsampleConfig ds = config.downsample;
  return make_forecaster(backend, ptog, config.filter,
                         [ds](double rate) { return ds.resolve(rate); });
}

EpochReport forecast_epoch(const Ptog& ptog, const EpochPoint& epoch, const RunConfig& config,
                           const Forecaster& backend, int max_in_flight) {
  const auto t_start = Clock::now();
  EpochReport report;
  report.epoch = epoch;
  report.attempts_total = config.attempts;

  ObservationWindow window;
  try {
    window = extract_window(ptog, epoch, config.history_depth);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoHistory) throw;
    report.failed = true;
    report.error = e.what();
    report.flags.push_back("no_history");
    return report;
  }
  if (window.short_history()) report.flags.push_back("short_history");
  for (const auto& s : window.history) report.history_runs.push_back(s.run.index);

  ForecastContext context;
  context.epoch = epoch;
  for (const auto& s : window.history) {
    const DownsampleSpec ds = config.downsample.resolve(s.sample_rate_hz);
    context.history.push_back(preprocess(s, config.filter, ds));
  }
  const MeasurementSeries& latest = window.history.back();
  report.downsample_factor = config.downsample.resolve(latest.sample_rate_hz).factor;
  report.horizon = context.history.back().size();
  report.timing.window_ms = ms_since(t_start);

  ForecastRequest request;
  request.prompt = build_prompt(encode_history(context.history, config.encoding),
                                config.prompt_template);
  request.temperature = config.resolved_temperature();
  request.top_p = config.top_p;
  request.attempts = config.attempts;
  request.horizon = report.horizon;
  request.encoding = config.encoding;
  request.max_in_flight = max_in_flight;

  const auto t_forecast = Clock::now();
  std::vector<ForecastAttempt> attempts;
  PointEstimate<double> estimate;
  try {
    attempts = forecast_ensemble(backend, context, request);
    estimate = aggregate(prediction_matrix(attempts, epoch));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAllAttemptsFailed &&
        e.code() != ErrorCode::kBackendUnreachable) {
      throw;
    }
    report.failed = true;
    report.error = e.what();
    report.flags.push_back(e.code() == ErrorCode::kAllAttemptsFailed ? "all_attempts_failed"
                                                                     : "backend_unreachable");
    report.timing.forecast_ms = ms_since(t_forecast);
    report.timing.total_ms = ms_since(t_start);
    return report;
  }
  report.timing.forecast_ms = ms_since(t_forecast);
  report.attempts_used = static_cast<int>(estimate.attempts_used);
  report.median = estimate.median;
  report.sd = estimate.sd;
  int failures = 0, stripped = 0;
  for (const auto& a : attempts) {
    failures += a.ok() ? 0 : 1;
    stripped += a.prose_stripped ? 1 : 0;
  }
  if (failures > 0) report.flags.push_back("attempt_failures:" + std::to_string(failures));
  if (stripped > 0) report.flags.push_back("prose_stripped:" + std::to_string(stripped));

  // The forecast is fixed; only now consult the target run.
  const MeasurementSeries* truth = ptog.get_series(epoch.run, epoch.state);
  if (truth == nullptr) {
    report.flags.push_back("no_ground_truth");
    report.timing.total_ms = ms_since(t_start);
    return report;
  }
  Series observed = quantise(
      preprocess(*truth, config.filter, config.downsample.resolve(truth->sample_rate_hz)),
      config.encoding);
  const Eigen::Index n = std::min(observed.size(), report.median.size());
  if (observed.size() != report.median.size()) {
    report.flags.push_back("truncated_to:" + std::to_string(n));
  }
  const auto o = observed.head(n);
  const auto y = report.median.head(n);
  report.q_rmse = rmse(o, y);
  const ErrorStats stats = error_stats(y, o);
  report.err_avg = stats.err_avg;
  report.err_std = stats.err_std;
  report.decision = decide(*report.q_rmse, config.thresholds);
  for (const auto& a : attempts) {
    if (a.ok()) report.attempt_rmse.push_back(rmse(o, a.values().head(n)));
  }
  report.truth = std::move(observed);
  report.timing.total_ms = ms_since(t_start);
  return report;
}

void apply_health(EpochReport& report, double& cumulative, const ControlThresholds& th) {
  const HealthVerdict v = accumulate_health(cumulative, report.q_rmse.value_or(0.0), th);
  cumulative = v.cumulative;
  report.cumulative_rmse = v.cumulative;
  report.health = v.value;
}

EpochReport run_epoch(const Ptog& ptog, const EpochPoint& epoch, const RunConfig& config,
                      const Forecaster& backend, double& cumulative) {
  EpochReport r = forecast_epoch(ptog, epoch, config, backend, config.max_in_flight);
  apply_health(r, cumulative, config.thresholds);
  return r;
}

std::vector<RunSummary> summarize_runs(const Ptog& ptog, const std::vector<EpochReport>& epochs) {
  struct Acc {
    std::vector<double> errors;
    double rmse_sum = 0.0;
    int count = 0;
  };
  std::map<int, Acc> by_run;
  for (const auto& e : epochs) {
    if (!e.evaluated()) continue;
    Acc& acc = by_run[e.epoch.run.index];
    const Eigen::Index n = std::min(e.truth->size(), e.median.size());
    for (Eigen::Index j = 0; j < n; ++j) {
      acc.errors.push_back(std::fabs((*e.truth)[j] - e.median[j]));
    }
    acc.rmse_sum += *e.q_rmse;
    ++acc.count;
  }
  std::vector<RunSummary> out;
  for (const auto& [run, acc] : by_run) {
    RunSummary s;
    s.run = run;
    s.epochs = acc.count;
    const auto& meta = ptog.run_metadata(RunId{run});
    if (auto it = meta.find("flank_wear_mm"); it != meta.end()) s.flank_wear_mm = it->second;
    if (auto it = meta.find("flank_wear_interpolated"); it != meta.end()) {
      s.wear_interpolated = it->second != 0.0;
    }
    const Eigen::Map<const Series> err(acc.errors.data(), static_cast<Eigen::Index>(acc.errors.size()));
    s.err_avg = err.mean();
    s.err_std = std::sqrt((err.array() - s.err_avg).square().mean());
    s.rmse_mean = acc.rmse_sum / acc.count;
    out.push_back(s);
  }
  return out;
}

SessionReport replay(const Ptog& ptog, const RunConfig& config, const Forecaster& backend,
                     const ReplayOptions& options) {
  validate(config);
  SessionReport session;
  session.config = config;
  if (!options.reproducible) session.generated_at = utc_timestamp();

  const std::vector<EpochPoint> epochs = enumerate_epochs(ptog, config.min_history);
  double cumulative = 0.0;
  int current_run = 0;
  auto fold = [&](EpochReport& r) {
    if (config.health_scope == HealthScope::kRun && r.epoch.run.index != current_run) {
      cumulative = 0.0;
    }
    current_run = r.epoch.run.index;
    apply_health(r, cumulative, config.thresholds);
  };

  if (config.halt_on_stop) {
    for (const auto& epoch : epochs) {
      EpochReport r = forecast_epoch(ptog, epoch, config, backend, config.max_in_flight);
      fold(r);
      session.epochs.push_back(std::move(r));
      if (session.epochs.back().decision == ControlDecision::kStop) {
        session.halted_at = epoch;
        break;
      }
    }
  } else {
    std::vector<EpochReport> reports(epochs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    auto worker = [&] {
      for (std::size_t i = next++; i < epochs.size(); i = next++) {
        try {
          reports[i] = forecast_epoch(ptog, epochs[i], config, backend, 1);
        } catch (...) {
          std::lock_guard lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
        }
      }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.max_in_flight),
                                               epochs.size());
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    for (auto& r : reports) {
      fold(r);
      session.epochs.push_back(std::move(r));
    }
  }

  double rmse_sum = 0.0;
  int evaluated = 0;
  for (auto& r : session.epochs) {
    if (options.reproducible) r.timing = {};
    if (r.failed) {
      ++session.failed_epochs;
      spdlog::warn("run {} {}: {}", r.epoch.run.index, r.epoch.state.label, r.error);
    }
    if (r.evaluated()) {
      rmse_sum += *r.q_rmse;
      ++evaluated;
    }
  }
  session.cumulative_rmse = cumulative;
  session.health = cumulative > config.thresholds.t_health ? Health::kFail : Health::kPass;
  if (config.health_scope == HealthScope::kRun) {
    // Session verdict under per-run scope: fail if any run failed.
    for (const auto& r : session.epochs) {
      if (r.health == Health::kFail) session.health = Health::kFail;
    }
  }
  session.mean_rmse = evaluated > 0 ? rmse_sum / evaluated : 0.0;
  session.runs = summarize_runs(ptog, session.epochs);
  return session;
}

}  // namespace gendt
