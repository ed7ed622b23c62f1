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

#include <filesystem>
#include <string>
#include <vector>

#include "gendt/controller.hpp"
#include "json.hpp"

namespace gendt {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const EpochReport& report);
EpochReport epoch_report_from_json(const nlohmann::json& j);

/// report.json text. Keys are sorted, so equal sessions give equal bytes.
std::string session_to_string(const SessionReport& session);
/// Throws kParseError / kSchemaVersionMismatch.
SessionReport session_from_string(std::string_view text);

/// Five-number summary; quartiles by linear interpolation between order
/// statistics (position p * (n - 1)).
struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

BoxStats box_stats(std::vector<double> values);

/// run,flank_wear_mm,err_avg,err_std: one row per run with epochs.
std::string run_table_csv(const SessionReport& session);

/// Forecast median with a +/- 1 SD band against the observed series.
std::string overlay_svg(const EpochReport& report);

/// Per-run box plot of attempt RMSEs, flank wear on a secondary axis.
std::string boxplot_svg(const SessionReport& session);

/// Writes table.csv, boxplot.svg and overlay_run<k>_<state>.svg into
/// `out_dir`; returns the paths written.
std::vector<std::filesystem::path> write_report_artifacts(const SessionReport& session,
                                                          const std::filesystem::path& out_dir);

}  // namespace gendt
