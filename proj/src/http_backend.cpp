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

#include <spdlog/spdlog.h>

#include <chrono>
#include <random>
#include <thread>

#include "gendt/error.hpp"
#include "gendt/forecast.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gendt {

namespace {

using nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigError, "endpoint must include a scheme: " + url);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

json make_body(const BackendConfig& config, std::string_view prompt, double temperature,
               double top_p) {
  json messages = json::array();
  const auto newline = prompt.find('\n');
  if (newline != std::string_view::npos) {
    messages.push_back({{"role", "system"}, {"content", std::string(prompt.substr(0, newline))}});
    messages.push_back({{"role", "user"}, {"content", std::string(prompt.substr(newline + 1))}});
  } else {
    messages.push_back({{"role", "user"}, {"content", std::string(prompt)}});
  }
  return {{"model", config.model_name},
          {"messages", std::move(messages)},
          {"temperature", temperature},
          {"top_p", top_p}};
}

std::string extract_content(const std::string& body) {
  try {
    const json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("unexpected response body: ") + e.what());
  }
}

double jitter_fraction() {
  thread_local std::mt19937 gen{std::random_device{}()};
  return std::uniform_real_distribution<double>(0.0, 0.1)(gen);
}

}  // namespace

std::string llm_http_call(const BackendConfig& config, const std::string& api_key,
                          std::string_view prompt, double temperature, double top_p) {
  const Endpoint ep = split_endpoint(config.endpoint);
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::duration<double>(config.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  const httplib::Headers headers{{"Authorization", "Bearer " + api_key}};
  const std::string body = make_body(config, prompt, temperature, top_p).dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = config.retry_base_delay_s * std::ldexp(1.0, attempt - 1);
      const double sleep_s = delay * (1.0 + jitter_fraction());
      spdlog::warn("llm_http retry {}/{} after {:.3f}s: {}", attempt, config.max_retries,
                   sleep_s, last_error);
      std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
    }
    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      throw Error(ErrorCode::kAuthError, "endpoint rejected credential (HTTP " +
                                             std::to_string(status) + ")");
    }
    if (status == 429 || status >= 500) {
      last_error = "HTTP " + std::to_string(status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw Error(ErrorCode::kMalformedResponse, "unexpected HTTP " + std::to_string(status));
    }
    return extract_content(res->body);
  }
  throw Error(ErrorCode::kBackendUnreachable,
              "gave up after " + std::to_string(config.max_retries + 1) + " calls: " + last_error);
}

}  // namespace gendt
