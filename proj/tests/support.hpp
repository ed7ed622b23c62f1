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

// Generators and independent oracles shared by the unit tests and the
// acceptance binary. Nothing here calls into the code under test for the
// value it is meant to check.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gendt/dataset.hpp"
#include "gendt/ptog.hpp"
#include "gendt/windowing.hpp"

namespace gendt::testing {

using Rng = std::mt19937_64;

inline std::filesystem::path source_dir() { return GENDT_SOURCE_DIR; }
inline std::filesystem::path fixture_dir() { return source_dir() / "data" / "milling"; }
inline std::filesystem::path config_path(const std::string& name) {
  return source_dir() / "configs" / (name + ".json");
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gendt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Series random_series(Rng& rng, Eigen::Index n, double lo = 0.0, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Series s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = u(rng);
  return s;
}

inline MeasurementSeries make_series(int run, int state, Series samples, double rate = 250.0) {
  MeasurementSeries m;
  m.run = RunId{run};
  m.state = StateId{state, "P" + std::to_string(state)};
  m.sensor = SensorId{"spindle_current", "A"};
  m.sample_rate_hz = rate;
  m.samples = std::move(samples);
  return m;
}

struct RandomGraphSpec {
  int max_runs = 12;
  int max_states = 5;
  int max_run_gap = 3;   // run indices need not be contiguous
  double dropout = 0.3;  // probability a run lacks a state
  int max_len = 8;
};

inline Ptog random_ptog(Rng& rng, const RandomGraphSpec& spec = {}) {
  std::uniform_int_distribution<int> n_runs(1, spec.max_runs);
  std::uniform_int_distribution<int> n_states(1, spec.max_states);
  std::uniform_int_distribution<int> gap(1, spec.max_run_gap);
  std::uniform_int_distribution<int> len(1, spec.max_len);
  std::bernoulli_distribution drop(spec.dropout);
  std::uniform_real_distribution<double> wear(0.0, 0.5);
  Ptog g;
  const int runs = n_runs(rng);
  const int states = n_states(rng);
  int run = 0;
  for (int r = 0; r < runs; ++r) {
    run += gap(rng);
    g.add_run(RunId{run});
    if (drop(rng)) g.set_run_metadata(RunId{run}, "flank_wear_mm", wear(rng));
    for (int s = 1; s <= states; ++s) {
      if (drop(rng)) continue;
      g.add_series(make_series(run, s, random_series(rng, len(rng)), 250.0));
    }
  }
  return g;
}

/// All vertices before the target run holding the state, last `depth` of
/// them, ascending. Computed from the raw vertex map.
inline std::vector<int> window_oracle(const Ptog& g, int run, int state, int depth) {
  std::vector<int> prior;
  for (const auto& [key, series] : g.series()) {
    if (key.second == state && key.first < run) prior.push_back(key.first);
  }
  std::sort(prior.begin(), prior.end());
  if (static_cast<int>(prior.size()) > depth) {
    prior.erase(prior.begin(), prior.end() - depth);
  }
  return prior;
}

/// Vertices with at least `min_history` prior occurrences of their state,
/// ordered by (run, state).
inline std::vector<std::pair<int, int>> epochs_oracle(const Ptog& g, int min_history) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [key, series] : g.series()) {
    int prior = 0;
    for (const auto& [other, s2] : g.series()) {
      if (other.second == key.second && other.first < key.first) ++prior;
    }
    if (prior >= min_history) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Per-column median by full sort.
inline Series median_oracle(const Eigen::MatrixXd& m) {
  Series out(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    std::vector<double> c(m.col(j).data(), m.col(j).data() + m.rows());
    std::sort(c.begin(), c.end());
    const std::size_t k = c.size();
    out[j] = k % 2 == 1 ? c[k / 2] : (c[k / 2 - 1] + c[k / 2]) / 2.0;
  }
  return out;
}

/// Round to two decimals, half away from zero, by exact long double
/// arithmetic (x * 100 is exact in the 64-bit significand for |x| < 2^10).
inline double round2_oracle(double x) {
  const long double scaled = static_cast<long double>(x) * 100.0L;
  return static_cast<double>(std::roundl(scaled)) / 100.0;
}

/// Steady-state amplitude ratio of a sine passed through `filter`: the peak
/// over the last `tail` samples of a long run.
template <typename Filter>
double sine_gain(Filter&& filter, double freq_hz, double rate_hz, int n = 20000,
                 int tail = 4000) {
  Series x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * freq_hz * i / rate_hz);
  const Series y = filter(x);
  return y.tail(tail).cwiseAbs().maxCoeff();
}

/// Welch-style averaged power spectrum by a direct DFT over non-overlapping
/// segments. Returns (frequency, power) pairs for bins 1 .. seg/2.
inline std::vector<std::pair<double, double>> averaged_spectrum(const Series& x, double rate_hz,
                                                                int seg) {
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(seg / 2));
  const int segments = static_cast<int>(x.size()) / seg;
  for (int k = 1; k <= seg / 2; ++k) {
    double power = 0.0;
    for (int s = 0; s < segments; ++s) {
      std::complex<double> acc = 0.0;
      for (int t = 0; t < seg; ++t) {
        // Hann window to keep leakage from the passband out of the stopband.
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t / seg);
        acc += w * x[s * seg + t] * std::polar(1.0, -2.0 * std::numbers::pi * k * t / seg);
      }
      power += std::norm(acc);
    }
    out[static_cast<std::size_t>(k - 1)] = {k * rate_hz / seg, power / segments};
  }
  return out;
}

inline Ptog milling_ptog() {
  const FixtureSpec fixture = load_fixture_spec(fixture_dir());
  return build_ptog(ingest_fixture(fixture_dir(), fixture));
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

/// Runs the gendt binary with `args`; stdout captured, stderr appended.
inline CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + " \"" + std::string(GENDT_CLI_PATH) + "\" " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quoted(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace gendt::testing
