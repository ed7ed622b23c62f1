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

#include "gendt/config.hpp"

#include <cmath>

#include "gendt/error.hpp"
#include "json_util.hpp"

namespace gendt {

using detail::json;

void validate(const ControlThresholds& th) {
  if (!(th.t_low > 0.0) || !(th.t_high >= th.t_low) || !std::isfinite(th.t_high)) {
    throw Error(ErrorCode::kConfigError, "thresholds need 0 < t_low <= t_high");
  }
  if (!(th.t_health > 0.0) || !std::isfinite(th.t_health)) {
    throw Error(ErrorCode::kConfigError, "t_health must be positive");
  }
}

DownsampleSpec DownsampleConfig::resolve(double sample_rate_hz) const {
  if (factor) return DownsampleSpec{*factor};
  if (target_rate_hz) return downsample_for_rate(sample_rate_hz, *target_rate_hz);
  return DownsampleSpec{1};
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); };
  validate(c.thresholds);
  if (c.history_depth < 1) fail("history_depth must be >= 1");
  if (c.min_history < 1) fail("min_history must be >= 1");
  if (c.attempts < 1) fail("ensemble.attempts must be >= 1");
  if (c.max_in_flight < 1) fail("ensemble.max_in_flight must be >= 1");
  if (!(c.top_p > 0.0 && c.top_p <= 1.0)) fail("ensemble.top_p must lie in (0, 1]");
  if (!(c.resolved_temperature() >= 0.0)) fail("ensemble.temperature must be >= 0");
  if (c.filter.order < 1) fail("filter.order must be >= 1");
  if (!(c.filter.cutoff_hz > 0.0)) fail("filter.cutoff_hz must be positive");
  if (c.downsample.factor && c.downsample.target_rate_hz) {
    fail("downsample takes either factor or target_rate_hz, not both");
  }
  if (c.downsample.factor && *c.downsample.factor < 1) fail("downsample.factor must be >= 1");
  if (c.downsample.target_rate_hz && !(*c.downsample.target_rate_hz > 0.0)) {
    fail("downsample.target_rate_hz must be positive");
  }
  try {
    validate(c.encoding);
  } catch (const Error& e) {
    fail(std::string("encoding: ") + e.what());
  }
  if (c.prompt_template.find(kPromptPlaceholder) == std::string::npos) {
    fail("prompt template lacks " + std::string(kPromptPlaceholder));
  }
  if (c.backend.kind == BackendKind::kLlmHttp && c.backend.endpoint.empty()) {
    fail("backend.endpoint is required for llm_http");
  }
  if (c.backend.max_retries < 0) fail("backend.max_retries must be >= 0");
  if (!(c.backend.timeout_s > 0.0)) fail("backend.timeout_s must be positive");
  if (!(c.backend.noise_sigma >= 0.0)) fail("backend.noise_sigma must be >= 0");
}

json to_json(const RunConfig& c) {
  json backend = {
      {"kind", std::string(to_string(c.backend.kind))},
      {"endpoint", c.backend.endpoint},
      {"model_name", c.backend.model_name},
      {"profile", c.backend.profile},
      {"api_key_env", c.backend.api_key_env},
      {"timeout_s", c.backend.timeout_s},
      {"max_retries", c.backend.max_retries},
      {"retry_base_delay_s", c.backend.retry_base_delay_s},
      {"noise_sigma", c.backend.noise_sigma},
  };
  backend["rng_seed"] = c.backend.rng_seed ? json(*c.backend.rng_seed) : json(nullptr);

  json downsample = json::object();
  if (c.downsample.factor) downsample["factor"] = *c.downsample.factor;
  if (c.downsample.target_rate_hz) downsample["target_rate_hz"] = *c.downsample.target_rate_hz;

  json j = {
      {"backend", backend},
      {"filter",
       {{"cutoff_hz", c.filter.cutoff_hz},
        {"order", c.filter.order},
        {"zero_phase", c.filter.zero_phase}}},
      {"downsample", downsample},
      {"encoding",
       {{"decimals", c.encoding.decimals},
        {"separator", c.encoding.separator},
        {"scale", c.encoding.scale}}},
      {"history_depth", c.history_depth},
      {"min_history", c.min_history},
      {"ensemble",
       {{"attempts", c.attempts}, {"top_p", c.top_p}, {"max_in_flight", c.max_in_flight}}},
      {"thresholds",
       {{"t_low", c.thresholds.t_low},
        {"t_high", c.thresholds.t_high},
        {"t_health", c.thresholds.t_health}}},
      {"prompt_template", c.prompt_template},
      {"rng_seed", c.rng_seed},
      {"halt_on_stop", c.halt_on_stop},
      {"health_scope", c.health_scope == HealthScope::kRun ? "run" : "session"},
  };
  j["ensemble"]["temperature"] = c.temperature ? json(*c.temperature) : json(nullptr);
  j["prompt_template_path"] =
      c.prompt_template_path ? json(*c.prompt_template_path) : json(nullptr);
  return j;
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
    RunConfig c;
    if (j.contains("backend")) {
      const json& b = j["backend"];
      c.backend.kind = backend_kind_from_string(detail::value_or<std::string>(b, "kind", "persistence"));
      c.backend.endpoint = detail::value_or<std::string>(b, "endpoint", "");
      c.backend.model_name = detail::value_or<std::string>(b, "model_name", "");
      c.backend.profile = detail::value_or<std::string>(b, "profile", c.backend.profile);
      c.backend.api_key_env = detail::value_or<std::string>(b, "api_key_env", c.backend.api_key_env);
      c.backend.timeout_s = detail::value_or(b, "timeout_s", c.backend.timeout_s);
      c.backend.max_retries = detail::value_or(b, "max_retries", c.backend.max_retries);
      c.backend.retry_base_delay_s =
          detail::value_or(b, "retry_base_delay_s", c.backend.retry_base_delay_s);
      c.backend.noise_sigma = detail::value_or(b, "noise_sigma", c.backend.noise_sigma);
      if (b.contains("rng_seed") && !b["rng_seed"].is_null()) {
        c.backend.rng_seed = b["rng_seed"].get<std::uint64_t>();
      }
      if (b.contains("api_key") || b.contains("credential")) {
        throw Error(ErrorCode::kConfigError,
                    "credentials may not appear in a config; name an environment "
                    "variable in backend.api_key_env");
      }
    }
    if (j.contains("filter")) {
      const json& f = j["filter"];
      c.filter.cutoff_hz = detail::value_or(f, "cutoff_hz", c.filter.cutoff_hz);
      c.filter.order = detail::value_or(f, "order", c.filter.order);
      c.filter.zero_phase = detail::value_or(f, "zero_phase", c.filter.zero_phase);
    }
    if (j.contains("downsample")) {
      const json& d = j["downsample"];
      if (d.contains("factor") && !d["factor"].is_null()) c.downsample.factor = d["factor"].get<int>();
      if (d.contains("target_rate_hz") && !d["target_rate_hz"].is_null()) {
        c.downsample.target_rate_hz = d["target_rate_hz"].get<double>();
      }
    }
    if (j.contains("encoding")) {
      const json& e = j["encoding"];
      c.encoding.decimals = detail::value_or(e, "decimals", c.encoding.decimals);
      c.encoding.separator = detail::value_or(e, "separator", c.encoding.separator);
      c.encoding.scale = detail::value_or(e, "scale", c.encoding.scale);
    }
    c.history_depth = detail::value_or(j, "history_depth", c.history_depth);
    c.min_history = detail::value_or(j, "min_history", c.min_history);
    if (j.contains("ensemble")) {
      const json& e = j["ensemble"];
      c.attempts = detail::value_or(e, "attempts", c.attempts);
      c.top_p = detail::value_or(e, "top_p", c.top_p);
      c.max_in_flight = detail::value_or(e, "max_in_flight", c.max_in_flight);
      if (e.contains("temperature") && !e["temperature"].is_null()) {
        c.temperature = e["temperature"].get<double>();
      }
    }
    if (!j.contains("thresholds")) {
      throw Error(ErrorCode::kConfigError, "thresholds are mandatory");
    }
    c.thresholds.t_low = detail::require<double>(j["thresholds"], "t_low");
    c.thresholds.t_high = detail::require<double>(j["thresholds"], "t_high");
    c.thresholds.t_health = detail::require<double>(j["thresholds"], "t_health");

    if (j.contains("prompt_template_path") && !j["prompt_template_path"].is_null()) {
      c.prompt_template_path = j["prompt_template_path"].get<std::string>();
    }
    if (j.contains("prompt_template") && !j["prompt_template"].is_null()) {
      c.prompt_template = j["prompt_template"].get<std::string>();
    } else if (c.prompt_template_path) {
      std::filesystem::path p(*c.prompt_template_path);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.prompt_template = detail::read_file(p.string());
    }
    c.rng_seed = detail::value_or<std::uint64_t>(j, "rng_seed", c.rng_seed);
    c.halt_on_stop = detail::value_or(j, "halt_on_stop", c.halt_on_stop);
    const auto scope = detail::value_or<std::string>(j, "health_scope", "session");
    if (scope == "run") {
      c.health_scope = HealthScope::kRun;
    } else if (scope == "session") {
      c.health_scope = HealthScope::kSession;
    } else {
      throw Error(ErrorCode::kConfigError, "health_scope must be 'run' or 'session'");
    }
    validate(c);
    return c;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(detail::read_file(path.string()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

}  // namespace gendt
