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

// gendt: ingest, replay, forecast and report.
//
// Exit codes: 0 ok, 2 input error, 3 config error, 4 halted on Stop.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gendt/config.hpp"
#include "gendt/controller.hpp"
#include "gendt/dataset.hpp"
#include "gendt/error.hpp"
#include "gendt/ptog.hpp"
#include "gendt/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitHalted = 4;

int exit_code_for(const gendt::Error& e) {
  switch (e.code()) {
    case gendt::ErrorCode::kConfigError:
    case gendt::ErrorCode::kAuthError:
    case gendt::ErrorCode::kInvalidCutoff:
    case gendt::ErrorCode::kMissingPlaceholder:
      return kExitConfig;
    default:
      return kExitInput;
  }
}

struct IngestArgs {
  std::string fixture;
  std::string out = "ptog.json";
  bool dry_run = false;
};

struct ReplayArgs {
  std::string ptog;
  std::string config;
  std::optional<std::string> backend;
  std::string out = "report.json";
  bool reproducible = false;
  bool halt_on_stop = false;
  std::optional<std::string> health_scope;
  std::optional<int> max_in_flight;
};

struct ForecastArgs {
  std::string ptog;
  std::string config;
  std::optional<std::string> backend;
  int run = 0;
  std::string state;
};

struct ReportArgs {
  std::string report;
  std::string out_dir = "report";
};

gendt::RunConfig load_config(const std::string& path, const std::optional<std::string>& backend) {
  gendt::RunConfig config = gendt::load_run_config(path);
  if (backend) config.backend.kind = gendt::backend_kind_from_string(*backend);
  return config;
}

int cmd_ingest(const IngestArgs& a) {
  const gendt::FixtureSpec fixture = gendt::load_fixture_spec(a.fixture);
  const gendt::IngestResult result = gendt::ingest_fixture(a.fixture, fixture);
  const gendt::Ptog ptog = gendt::build_ptog(result);
  std::size_t samples = 0;
  for (const auto& [key, s] : ptog.series()) samples += static_cast<std::size_t>(s.samples.size());
  std::printf("runs: %zu\nstates: %zu\nseries: %zu\nsamples: %zu\n", ptog.runs().size(),
              ptog.states().size(), ptog.vertex_count(), samples);
  if (a.dry_run) {
    std::printf("dry run: nothing written\n");
    return kExitOk;
  }
  const fs::path out(a.out);
  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  const fs::path manifest = gendt::write_ingest(result, dir);
  gendt::save_ptog(ptog, out);
  std::printf("manifest: %s\nptog: %s\n", manifest.string().c_str(), out.string().c_str());
  return kExitOk;
}

int cmd_replay(const ReplayArgs& a) {
  gendt::RunConfig config = load_config(a.config, a.backend);
  if (a.halt_on_stop) config.halt_on_stop = true;
  if (a.max_in_flight) config.max_in_flight = *a.max_in_flight;
  if (a.health_scope) {
    if (*a.health_scope == "run") {
      config.health_scope = gendt::HealthScope::kRun;
    } else if (*a.health_scope == "session") {
      config.health_scope = gendt::HealthScope::kSession;
    } else {
      throw gendt::Error(gendt::ErrorCode::kConfigError, "--health-scope must be run or session");
    }
  }
  gendt::validate(config);
  const gendt::Ptog ptog = gendt::load_ptog(a.ptog);
  const auto backend = gendt::make_backend(config, ptog);
  const gendt::SessionReport session =
      gendt::replay(ptog, config, *backend, gendt::ReplayOptions{a.reproducible});

  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw gendt::Error(gendt::ErrorCode::kIoError, "cannot write " + a.out);
    out << gendt::session_to_string(session);
  }
  std::printf("epochs: %zu (failed %d)\n", session.epochs.size(), session.failed_epochs);
  std::printf("%-4s %-14s %-9s %-9s\n", "run", "flank_wear_mm", "err_avg", "err_std");
  for (const auto& r : session.runs) {
    const std::string wear = r.flank_wear_mm ? std::to_string(*r.flank_wear_mm) : "-";
    std::printf("%-4d %-14s %-9.3f %-9.3f\n", r.run, wear.c_str(), r.err_avg, r.err_std);
  }
  std::printf("mean rmse: %.4f\ncumulative rmse: %.4f\nhealth: %s\nreport: %s\n",
              session.mean_rmse, session.cumulative_rmse,
              std::string(gendt::to_string(session.health)).c_str(), a.out.c_str());
  if (session.halted_at) {
    std::printf("halted at run %d %s\n", session.halted_at->run.index,
                session.halted_at->state.label.c_str());
    return kExitHalted;
  }
  return kExitOk;
}

int cmd_forecast(const ForecastArgs& a) {
  const gendt::RunConfig config = load_config(a.config, a.backend);
  const gendt::Ptog ptog = gendt::load_ptog(a.ptog);
  const auto state = ptog.find_state(a.state);
  if (!state) {
    throw gendt::Error(gendt::ErrorCode::kInvalidArgument, "unknown state '" + a.state + "'");
  }
  const auto backend = gendt::make_backend(config, ptog);
  double cumulative = 0.0;
  const gendt::EpochReport r =
      gendt::run_epoch(ptog, {gendt::RunId{a.run}, *state}, config, *backend, cumulative);
  if (r.failed) {
    std::fprintf(stderr, "forecast failed: %s\n", r.error.c_str());
    return kExitInput;
  }
  std::ostringstream line;
  for (Eigen::Index i = 0; i < r.median.size(); ++i) {
    if (i > 0) line << ',';
    line << r.median[i];
  }
  std::printf("%s\n", line.str().c_str());
  if (r.q_rmse) {
    std::fprintf(stderr, "rmse %.4f decision %s\n", *r.q_rmse,
                 std::string(gendt::to_string(*r.decision)).c_str());
  }
  return kExitOk;
}

int cmd_report(const ReportArgs& a) {
  std::ifstream in(a.report, std::ios::binary);
  if (!in) throw gendt::Error(gendt::ErrorCode::kIoError, "cannot read " + a.report);
  std::stringstream text;
  text << in.rdbuf();
  const gendt::SessionReport session = gendt::session_from_string(text.str());
  for (const auto& p : gendt::write_report_artifacts(session, a.out_dir)) {
    std::printf("%s\n", p.string().c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("gendt"));

  CLI::App app{"Generative digital twin: replay forecasts over a process graph"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  IngestArgs ingest;
  auto* ing = app.add_subcommand("ingest", "Segment a fixture and write ptog.json");
  ing->add_option("--fixture", ingest.fixture, "Fixture directory")->required();
  ing->add_option("--out", ingest.out, "Output graph file");
  ing->add_flag("--dry-run", ingest.dry_run, "Validate only");

  ReplayArgs replay;
  auto* rep = app.add_subcommand("replay", "Replay every epoch and write report.json");
  rep->add_option("--ptog", replay.ptog, "Graph file")->required();
  rep->add_option("--config", replay.config, "Run configuration")->required();
  rep->add_option("--backend", replay.backend, "Override backend kind")
      ->check(CLI::IsMember({"llm_http", "oracle", "persistence", "mock_noise"}));
  rep->add_option("--out", replay.out, "Report file");
  rep->add_flag("--reproducible", replay.reproducible, "Omit timestamps and timings");
  rep->add_flag("--halt-on-stop", replay.halt_on_stop, "Stop at the first Stop decision");
  rep->add_option("--health-scope", replay.health_scope, "run or session");
  rep->add_option("--max-in-flight", replay.max_in_flight, "Concurrent backend work")
      ->check(CLI::PositiveNumber);

  ForecastArgs forecast;
  auto* fc = app.add_subcommand("forecast", "Forecast one epoch and print the median");
  fc->add_option("--ptog", forecast.ptog, "Graph file")->required();
  fc->add_option("--config", forecast.config, "Run configuration")->required();
  fc->add_option("--backend", forecast.backend, "Override backend kind")
      ->check(CLI::IsMember({"llm_http", "oracle", "persistence", "mock_noise"}));
  fc->add_option("--run", forecast.run, "Target run")->required();
  fc->add_option("--state", forecast.state, "Target state label")->required();

  ReportArgs report;
  auto* rp = app.add_subcommand("report", "Emit table.csv and SVG plots from report.json");
  rp->add_option("--report", report.report, "report.json")->required();
  rp->add_option("--out-dir", report.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (ing->parsed()) return cmd_ingest(ingest);
    if (rep->parsed()) return cmd_replay(replay);
    if (fc->parsed()) return cmd_forecast(forecast);
    if (rp->parsed()) return cmd_report(report);
  } catch (const gendt::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
