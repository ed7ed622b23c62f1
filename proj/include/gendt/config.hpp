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
#include <filesystem>
#include <optional>
#include <string>

#include "gendt/codec.hpp"
#include "gendt/dsp.hpp"
#include "gendt/forecast.hpp"
#include "json.hpp"

namespace gendt {

struct ControlThresholds {
  double t_low = 0.0;
  double t_high = 0.0;
  double t_health = 0.0;
};

void validate(const ControlThresholds& th);

enum class HealthScope { kSession, kRun };

/// Either a fixed factor or a target output rate; the factor for a target
/// rate is resolved per series from its sample rate.
struct DownsampleConfig {
  std::optional<int> factor;
  std::optional<double> target_rate_hz;

  DownsampleSpec resolve(double sample_rate_hz) const;
};

struct RunConfig {
  BackendConfig backend;
  FilterSpec filter;
  DownsampleConfig downsample;
  EncodingSpec encoding;
  int history_depth = 4;
  int min_history = 4;
  int attempts = 10;
  std::optional<double> temperature;  // unset: backend profile default
  double top_p = 1.0;
  int max_in_flight = 1;
  ControlThresholds thresholds;
  std::optional<std::string> prompt_template_path;
  std::string prompt_template{default_prompt_template()};
  std::uint64_t rng_seed = 42;
  bool halt_on_stop = false;
  HealthScope health_scope = HealthScope::kSession;

  double resolved_temperature() const {
    return temperature ? *temperature : default_temperature(backend.profile);
  }
  /// The mock backend's seed falls back to the session seed.
  std::uint64_t resolved_backend_seed() const {
    return backend.rng_seed ? *backend.rng_seed : rng_seed;
  }
};

/// Throws kConfigError on any invalid field.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
/// Relative template paths resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace gendt
