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

#include "gendt/forecast.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "gendt/error.hpp"

namespace gendt {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kLlmHttp: return "llm_http";
    case BackendKind::kOracle: return "oracle";
    case BackendKind::kPersistence: return "persistence";
    case BackendKind::kMockNoise: return "mock_noise";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "llm_http") return BackendKind::kLlmHttp;
  if (name == "oracle") return BackendKind::kOracle;
  if (name == "persistence") return BackendKind::kPersistence;
  if (name == "mock_noise") return BackendKind::kMockNoise;
  throw Error(ErrorCode::kConfigError, "unknown backend kind '" + std::string(name) + "'");
}

double default_temperature(std::string_view profile) {
  return profile == "gpt-3.5-like" ? 0.7 : 1.0;
}

void validate(const ForecastRequest& request) {
  if (request.attempts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble size must be >= 1");
  }
  if (request.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "forecast horizon must be >= 1");
  }
  if (!(request.temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  if (!(request.top_p > 0.0 && request.top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "top_p must lie in (0, 1]");
  }
  if (request.max_in_flight < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  }
  validate(request.encoding);
}

Series length_adjust(const Series& values, Eigen::Index horizon) {
  if (values.size() <= horizon) return values;
  return values.head(horizon);
}

// ---------------------------------------------------------------------------
// Local baselines

namespace {

const Series& latest(const ForecastContext& context) {
  if (context.history.empty()) {
    throw Error(ErrorCode::kNoHistory, "forecast context has no history");
  }
  return context.history.back();
}

}  // namespace

std::string PersistenceForecaster::complete(const ForecastRequest& request,
                                            const ForecastContext& context, int) const {
  return encode(length_adjust(latest(context), request.horizon), request.encoding).text;
}

std::string MockNoiseForecaster::complete(const ForecastRequest& request,
                                          const ForecastContext& context, int attempt) const {
  Series values = length_adjust(latest(context), request.horizon);
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(context.epoch.run.index),
                    static_cast<std::uint32_t>(context.epoch.state.index),
                    static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> noise(0.0, sigma_);
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] += noise(gen);
  return encode(values, request.encoding).text;
}

std::string OracleForecaster::complete(const ForecastRequest& request,
                                       const ForecastContext& context, int) const {
  const MeasurementSeries* truth = ptog_.get_series(context.epoch.run, context.epoch.state);
  if (truth == nullptr) return {};
  Series values = preprocess(*truth, filter_, ds_(truth->sample_rate_hz));
  if (values.size() < request.horizon) {
    const Eigen::Index old = values.size();
    const double last = values[old - 1];
    values.conservativeResize(request.horizon);
    values.tail(request.horizon - old).setConstant(last);
  }
  return encode(length_adjust(values, request.horizon), request.encoding).text;
}

std::string HttpForecaster::complete(const ForecastRequest& request,
                                     const ForecastContext&, int) const {
  return llm_http_call(config_, api_key_, request.prompt, request.temperature, request.top_p);
}

std::string resolve_api_key(const BackendConfig& config) {
  const char* value = std::getenv(config.api_key_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::kConfigError,
                "llm_http backend needs a credential in environment variable " +
                    config.api_key_env);
  }
  return value;
}

std::unique_ptr<Forecaster> make_forecaster(const BackendConfig& config, const Ptog& ptog,
                                            const FilterSpec& filter,
                                            const DownsampleResolver& ds) {
  switch (config.kind) {
    case BackendKind::kPersistence:
      return std::make_unique<PersistenceForecaster>();
    case BackendKind::kMockNoise:
      if (!config.rng_seed) {
        throw Error(ErrorCode::kConfigError, "mock_noise backend requires rng_seed");
      }
      return std::make_unique<MockNoiseForecaster>(*config.rng_seed, config.noise_sigma);
    case BackendKind::kOracle:
      return std::make_unique<OracleForecaster>(ptog, filter, ds);
    case BackendKind::kLlmHttp:
      if (config.endpoint.empty()) {
        throw Error(ErrorCode::kConfigError, "llm_http backend requires an endpoint");
      }
      return std::make_unique<HttpForecaster>(config, resolve_api_key(config));
  }
  throw Error(ErrorCode::kConfigError, "unknown backend");
}

// ---------------------------------------------------------------------------
// Ensemble

std::vector<ForecastAttempt> forecast_ensemble(const Forecaster& backend,
                                               const ForecastContext& context,
                                               const ForecastRequest& request) {
  validate(request);
  if (context.history.empty()) {
    throw Error(ErrorCode::kNoHistory, "observation window is empty");
  }
  std::vector<ForecastAttempt> attempts(static_cast<std::size_t>(request.attempts));
  std::atomic<int> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (int i = next++; i < request.attempts; i = next++) {
      ForecastAttempt& a = attempts[static_cast<std::size_t>(i)];
      a.index = i + 1;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        a.raw_text = backend.complete(request, context, a.index);
        DecodeResult decoded = decode(a.raw_text, request.encoding, request.horizon);
        if (auto* ok = std::get_if<Decoded>(&decoded)) {
          a.prose_stripped = ok->prose_stripped;
          a.outcome = std::move(ok->values);
        } else {
          a.outcome = std::get<DecodeFailure>(decoded);
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kBackendUnreachable ||
            e.code() == ErrorCode::kMalformedResponse) {
          a.outcome = BackendFailure{e.what()};
        } else {
          std::lock_guard lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
        }
      }
      a.latency_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0).count();
    }
  };

  const int workers = std::min(request.max_in_flight, request.attempts);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  for (const auto& a : attempts) {
    if (a.prose_stripped) {
      spdlog::debug("attempt {} for run {} {}: leading prose stripped", a.index,
                    context.epoch.run.index, context.epoch.state.label);
    }
  }
  const bool all_unreachable = std::all_of(attempts.begin(), attempts.end(), [](const auto& a) {
    return std::holds_alternative<BackendFailure>(a.outcome);
  });
  if (all_unreachable) {
    throw Error(ErrorCode::kBackendUnreachable,
                std::get<BackendFailure>(attempts.front().outcome).message);
  }
  return attempts;
}

PredictionMatrix prediction_matrix(const std::vector<ForecastAttempt>& attempts,
                                   const EpochPoint& epoch) {
  std::vector<const Series*> ok;
  for (const auto& a : attempts) {
    if (a.ok()) ok.push_back(&a.values());
  }
  if (ok.empty()) {
    throw Error(ErrorCode::kAllAttemptsFailed,
                "all " + std::to_string(attempts.size()) + " attempts failed for run " +
                    std::to_string(epoch.run.index) + " " + epoch.state.label);
  }
  PredictionMatrix m;
  m.epoch = epoch;
  m.rows.resize(static_cast<Eigen::Index>(ok.size()), ok.front()->size());
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i]->size() != m.rows.cols()) {
      throw Error(ErrorCode::kLengthMismatch, "attempt rows differ in length");
    }
    m.rows.row(static_cast<Eigen::Index>(i)) = ok[i]->transpose();
  }
  return m;
}

}  // namespace gendt
