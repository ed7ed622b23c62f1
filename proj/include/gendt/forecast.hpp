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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gendt/codec.hpp"
#include "gendt/dsp.hpp"
#include "gendt/ensemble.hpp"
#include "gendt/ptog.hpp"
#include "gendt/windowing.hpp"

namespace gendt {

enum class BackendKind { kLlmHttp, kOracle, kPersistence, kMockNoise };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct BackendConfig {
  BackendKind kind = BackendKind::kPersistence;
  std::string endpoint;  // llm_http only
  std::string model_name;
  std::string profile = "gpt-4-like";
  // Name of the environment variable holding the credential. The credential
  // itself is never stored in a config.
  std::string api_key_env = "GENDT_API_KEY";
  double timeout_s = 60.0;
  int max_retries = 3;
  double retry_base_delay_s = 1.0;
  std::optional<std::uint64_t> rng_seed;  // mock_noise only
  double noise_sigma = 0.1;               // mock_noise only
};

/// 0.7 for "gpt-3.5-like", 1.0 otherwise.
double default_temperature(std::string_view profile);

/// Downsampling for a series recorded at the given rate.
using DownsampleResolver = std::function<DownsampleSpec(double sample_rate_hz)>;

struct ForecastRequest {
  std::string prompt;
  double temperature = 1.0;
  double top_p = 1.0;
  int attempts = 10;
  Eigen::Index horizon = 0;
  EncodingSpec encoding;
  int max_in_flight = 1;
};

void validate(const ForecastRequest& request);

/// What a backend may see for one epoch: the target coordinates and the
/// preprocessed history (oldest first). Never the target's own series.
struct ForecastContext {
  EpochPoint epoch;
  std::vector<Series> history;
};

struct BackendFailure {
  std::string message;
};

struct ForecastAttempt {
  int index = 0;  // 1-based
  std::variant<Series, DecodeFailure, BackendFailure> outcome;
  std::string raw_text;
  double latency_ms = 0.0;
  bool prose_stripped = false;

  bool ok() const { return std::holds_alternative<Series>(outcome); }
  const Series& values() const { return std::get<Series>(outcome); }
};

/// One forecasting backend. complete() returns the raw text of a single
/// attempt and must be safe to call concurrently.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual BackendKind kind() const = 0;
  virtual std::string complete(const ForecastRequest& request,
                               const ForecastContext& context, int attempt) const = 0;
};

/// Repeats the most recent history series.
class PersistenceForecaster : public Forecaster {
 public:
  BackendKind kind() const override { return BackendKind::kPersistence; }
  std::string complete(const ForecastRequest& request, const ForecastContext& context,
                       int attempt) const override;
};

/// Persistence plus Gaussian noise drawn from a stream keyed by
/// (seed, run, state, attempt), so results do not depend on scheduling.
class MockNoiseForecaster : public Forecaster {
 public:
  MockNoiseForecaster(std::uint64_t seed, double sigma) : seed_(seed), sigma_(sigma) {}
  BackendKind kind() const override { return BackendKind::kMockNoise; }
  std::string complete(const ForecastRequest& request, const ForecastContext& context,
                       int attempt) const override;

 private:
  std::uint64_t seed_;
  double sigma_;
};

/// Answers with the ground truth of the epoch, preprocessed like the history.
/// When the truth is shorter than the horizon its last value is repeated.
class OracleForecaster : public Forecaster {
 public:
  OracleForecaster(const Ptog& ptog, FilterSpec filter, DownsampleResolver ds)
      : ptog_(ptog), filter_(filter), ds_(std::move(ds)) {}
  BackendKind kind() const override { return BackendKind::kOracle; }
  std::string complete(const ForecastRequest& request, const ForecastContext& context,
                       int attempt) const override;

 private:
  const Ptog& ptog_;
  FilterSpec filter_;
  DownsampleResolver ds_;
};

/// Chat-completion style JSON over HTTP(S).
class HttpForecaster : public Forecaster {
 public:
  HttpForecaster(BackendConfig config, std::string api_key)
      : config_(std::move(config)), api_key_(std::move(api_key)) {}
  BackendKind kind() const override { return BackendKind::kLlmHttp; }
  std::string complete(const ForecastRequest& request, const ForecastContext& context,
                       int attempt) const override;

 private:
  BackendConfig config_;
  std::string api_key_;
};

/// Sends {model, messages, temperature, top_p} and returns the first choice's
/// message content. The first prompt line goes out as the system message and
/// the rest as the user message. Transport errors, 429 and 5xx are retried
/// up to max_retries times with doubling delay plus jitter; 401/403 throw
/// kAuthError immediately.
std::string llm_http_call(const BackendConfig& config, const std::string& api_key,
                          std::string_view prompt, double temperature, double top_p);

/// Reads the credential named by config.api_key_env. Throws kConfigError
/// naming the variable when it is unset or empty.
std::string resolve_api_key(const BackendConfig& config);

/// Builds the backend described by `config`. The oracle needs the graph and
/// preprocessing settings to look up the truth.
std::unique_ptr<Forecaster> make_forecaster(const BackendConfig& config, const Ptog& ptog,
                                            const FilterSpec& filter,
                                            const DownsampleResolver& ds);

/// Truncates to at most `horizon` values.
Series length_adjust(const Series& values, Eigen::Index horizon);

/// Runs request.attempts independent attempts (at most max_in_flight at a
/// time) and decodes each. Failed attempts stay in the result. Throws
/// kBackendUnreachable when every attempt failed at the transport level and
/// propagates kAuthError.
std::vector<ForecastAttempt> forecast_ensemble(const Forecaster& backend,
                                               const ForecastContext& context,
                                               const ForecastRequest& request);

/// Stacks the successful attempts. Throws kAllAttemptsFailed if there are none.
PredictionMatrix prediction_matrix(const std::vector<ForecastAttempt>& attempts,
                                   const EpochPoint& epoch);

}  // namespace gendt
