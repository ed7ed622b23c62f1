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

// Generates the synthetic milling fixture: run_<k>.csv spindle-current
// traces plus fixture.json with explicit segment boundaries and wear points.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "gendt/dataset.hpp"
#include "gendt/ptog.hpp"
#include "json.hpp"

namespace {

struct RunShape {
  int idle_before, entry, plateau, exit, idle_after;
};

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic milling fixture"};
  std::string out = "data/milling";
  std::uint64_t seed = 7;
  int runs = 14;
  double rate = 250.0;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--runs", runs, "Number of runs")->check(CLI::Range(1, 99));
  app.add_option("--sample-rate", rate, "Sample rate in Hz");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<int, double>> measured = {
      {1, 0.0},  {4, 0.11},  {6, 0.2},   {7, 0.24},  {8, 0.29},  {9, 0.28},
      {10, 0.29}, {11, 0.38}, {12, 0.4}, {13, 0.43}, {14, 0.45}};
  std::vector<int> run_ids;
  for (int k = 1; k <= runs; ++k) run_ids.push_back(k);
  std::vector<std::pair<int, double>> known;
  for (const auto& p : measured) {
    if (p.first <= runs) known.push_back(p);
  }
  std::vector<double> wear(runs + 1, 0.0);
  if (known.size() >= 2) {
    for (const auto& w : gendt::interpolate_wear(known, run_ids)) wear[w.run] = w.flank_wear_mm;
  }

  std::filesystem::create_directories(out);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> jitter(-12, 12);

  nlohmann::json boundaries = nlohmann::json::object();
  for (int k = 1; k <= runs; ++k) {
    const RunShape s{40 + jitter(rng), 120 + jitter(rng), 620 + 15 * k + 4 * jitter(rng),
                     90 + jitter(rng), 40 + jitter(rng)};
    const double idle = 0.45;
    // A blunter edge needs more torque: the plateau level rises with wear.
    const double level = 4.2 + 9.0 * wear[k];
    const double ripple = 0.25 + 0.3 * wear[k];
    std::vector<double> x;
    auto push = [&](double v, double sigma) { x.push_back(round4(v + sigma * noise(rng))); };

    for (int i = 0; i < s.idle_before; ++i) push(idle, 0.03);
    for (int i = 0; i < s.entry; ++i) {
      const double t = static_cast<double>(i + 1) / s.entry;
      // Engagement ramp: the tool enters the stock along an arc.
      push(idle + (level + 0.6 - idle) * (1.0 - std::pow(1.0 - t, 2.2)), 0.06);
    }
    for (int i = 0; i < s.plateau; ++i) {
      const double t = static_cast<double>(i) / rate;
      const double settle = 0.6 * std::exp(-static_cast<double>(i) / 40.0);
      const double drift = 0.15 * wear[k] * static_cast<double>(i) / s.plateau;
      push(level + settle + drift + ripple * std::sin(2.0 * std::numbers::pi * 1.7 * t), 0.12);
    }
    for (int i = 0; i < s.exit; ++i) {
      const double t = static_cast<double>(i + 1) / s.exit;
      push(level - (level - idle) * std::pow(t, 1.6), 0.06);
    }
    for (int i = 0; i < s.idle_after; ++i) push(idle, 0.03);

    gendt::write_sample_csv(std::filesystem::path(out) / ("run_" + std::to_string(k) + ".csv"), x);
    const int start = s.idle_before;
    const int p1_end = start + s.entry;
    const int p2_end = p1_end + s.plateau;
    boundaries[std::to_string(k)] = {start, p1_end, p2_end, p2_end + s.exit};
  }

  nlohmann::json fixture;
  fixture["sample_rate_hz"] = rate;
  fixture["sensor"] = "spindle_current";
  fixture["unit"] = "A";
  fixture["runs"] = run_ids;
  fixture["segmentation"] = {{"mode", "explicit"}, {"boundaries", boundaries}};
  fixture["wear_points"] = nlohmann::json::array();
  for (const auto& [run, w] : known) fixture["wear_points"].push_back({run, w});
  std::ofstream(std::filesystem::path(out) / "fixture.json") << fixture.dump(2) << "\n";
  std::cout << "wrote " << runs << " runs to " << out << "\n";
  return 0;
}
