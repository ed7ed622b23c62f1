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

#include "gendt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "gendt/error.hpp"
#include "json_util.hpp"

namespace gendt {

using detail::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::string decision_label(const EpochReport& r) {
  if (r.failed) return "failed";
  if (!r.decision) return "no action";
  return std::string(to_string(*r.decision));
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string csv_number(double v) {
  // Six decimals is plenty for amperes/millimetres and keeps rows stable.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct Scale {
  double lo, hi, out_lo, out_hi;
  double operator()(double v) const {
    if (hi == lo) return (out_lo + out_hi) / 2.0;
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
  }
};

std::string polyline(const Series& y, const Scale& sx, const Scale& sy) {
  std::string pts;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (i > 0) pts += ' ';
    pts += fmt(sx(static_cast<double>(i)), 2) + "," + fmt(sy(y[i]), 2);
  }
  return pts;
}

}  // namespace

json to_json(const EpochReport& r) {
  json j;
  j["run"] = r.epoch.run.index;
  j["state"] = r.epoch.state.label;
  j["state_index"] = r.epoch.state.index;
  j["history_runs"] = r.history_runs;
  j["downsample_factor"] = r.downsample_factor;
  j["horizon"] = r.horizon;
  j["attempts_total"] = r.attempts_total;
  j["attempts_used"] = r.attempts_used;
  j["median"] = detail::to_json_array(r.median);
  j["sd"] = detail::to_json_array(r.sd);
  j["truth"] = r.truth ? detail::to_json_array(*r.truth) : json(nullptr);
  j["attempt_rmse"] = r.attempt_rmse;
  j["q_rmse"] = optional_number(r.q_rmse);
  j["err_avg"] = optional_number(r.err_avg);
  j["err_std"] = optional_number(r.err_std);
  j["decision"] = decision_label(r);
  j["cumulative_rmse"] = r.cumulative_rmse;
  j["health"] = std::string(to_string(r.health));
  j["flags"] = r.flags;
  j["error"] = r.error;
  j["timing"] = {{"window_ms", r.timing.window_ms},
                 {"forecast_ms", r.timing.forecast_ms},
                 {"total_ms", r.timing.total_ms}};
  return j;
}

EpochReport epoch_report_from_json(const json& j) {
  EpochReport r;
  r.epoch.run = RunId{j.at("run").get<int>()};
  r.epoch.state = StateId{j.at("state_index").get<int>(), j.at("state").get<std::string>()};
  r.history_runs = j.at("history_runs").get<std::vector<int>>();
  r.downsample_factor = j.at("downsample_factor").get<int>();
  r.horizon = j.at("horizon").get<Eigen::Index>();
  r.attempts_total = j.at("attempts_total").get<int>();
  r.attempts_used = j.at("attempts_used").get<int>();
  r.median = detail::series_from_json(j.at("median"));
  r.sd = detail::series_from_json(j.at("sd"));
  if (!j.at("truth").is_null()) r.truth = detail::series_from_json(j.at("truth"));
  r.attempt_rmse = j.at("attempt_rmse").get<std::vector<double>>();
  r.q_rmse = number_or_null(j, "q_rmse");
  r.err_avg = number_or_null(j, "err_avg");
  r.err_std = number_or_null(j, "err_std");
  const auto decision = j.at("decision").get<std::string>();
  r.failed = decision == "failed";
  if (decision == "Continue") r.decision = ControlDecision::kContinue;
  if (decision == "Warning") r.decision = ControlDecision::kWarning;
  if (decision == "Stop") r.decision = ControlDecision::kStop;
  r.cumulative_rmse = j.at("cumulative_rmse").get<double>();
  r.health = j.at("health").get<std::string>() == "Fail" ? Health::kFail : Health::kPass;
  r.flags = j.at("flags").get<std::vector<std::string>>();
  r.error = j.value("error", "");
  const json& t = j.at("timing");
  r.timing = {t.at("window_ms").get<double>(), t.at("forecast_ms").get<double>(),
              t.at("total_ms").get<double>()};
  return r;
}

std::string session_to_string(const SessionReport& s) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  if (!s.generated_at.empty()) j["generated_at"] = s.generated_at;
  j["config"] = to_json(s.config);
  j["statistics"] = {{"sd", "population"}, {"err_std", "population"}, {"median", "midpoint for even k"}};
  j["epochs"] = json::array();
  for (const auto& e : s.epochs) j["epochs"].push_back(to_json(e));

  json table = json::array();
  for (const auto& r : s.runs) {
    table.push_back({{"run", r.run},
                     {"flank_wear_mm", optional_number(r.flank_wear_mm)},
                     {"flank_wear_interpolated", r.wear_interpolated},
                     {"epochs", r.epochs},
                     {"err_avg", r.err_avg},
                     {"err_std", r.err_std},
                     {"rmse_mean", r.rmse_mean}});
  }
  j["summary"] = {
      {"columns", {"run", "flank_wear_mm", "err_avg", "err_std"}},
      {"runs", table},
      {"cumulative_rmse", s.cumulative_rmse},
      {"health", std::string(to_string(s.health))},
      {"mean_rmse", s.mean_rmse},
      {"failed_epochs", s.failed_epochs},
  };
  j["summary"]["halted_at"] =
      s.halted_at ? json{{"run", s.halted_at->run.index}, {"state", s.halted_at->state.label}}
                  : json(nullptr);
  return j.dump(1) + "\n";
}

SessionReport session_from_string(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!j.is_object() || j.value("schema_version", -1) != kReportSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch, "not a version-1 replay report");
  }
  try {
    SessionReport s;
    s.generated_at = j.value("generated_at", "");
    s.config = run_config_from_json(j.at("config"));
    for (const auto& e : j.at("epochs")) s.epochs.push_back(epoch_report_from_json(e));
    const json& sum = j.at("summary");
    for (const auto& r : sum.at("runs")) {
      RunSummary rs;
      rs.run = r.at("run").get<int>();
      rs.flank_wear_mm = number_or_null(r, "flank_wear_mm");
      rs.wear_interpolated = r.at("flank_wear_interpolated").get<bool>();
      rs.epochs = r.at("epochs").get<int>();
      rs.err_avg = r.at("err_avg").get<double>();
      rs.err_std = r.at("err_std").get<double>();
      rs.rmse_mean = r.at("rmse_mean").get<double>();
      s.runs.push_back(rs);
    }
    s.cumulative_rmse = sum.at("cumulative_rmse").get<double>();
    s.health = sum.at("health").get<std::string>() == "Fail" ? Health::kFail : Health::kPass;
    s.mean_rmse = sum.at("mean_rmse").get<double>();
    s.failed_epochs = sum.at("failed_epochs").get<int>();
    if (!sum.at("halted_at").is_null()) {
      s.halted_at = EpochPoint{RunId{sum["halted_at"].at("run").get<int>()},
                               StateId{0, sum["halted_at"].at("state").get<std::string>()}};
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

BoxStats box_stats(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::kEmptyInput, "box plot of no values");
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), quantile(0.25), quantile(0.5), quantile(0.75), v.back()};
}

std::string run_table_csv(const SessionReport& session) {
  std::string out = "run,flank_wear_mm,err_avg,err_std\n";
  for (const auto& r : session.runs) {
    out += std::to_string(r.run) + ",";
    out += r.flank_wear_mm ? csv_number(*r.flank_wear_mm) : "";
    out += "," + csv_number(r.err_avg) + "," + csv_number(r.err_std) + "\n";
  }
  return out;
}

std::string overlay_svg(const EpochReport& r) {
  constexpr double kW = 640, kH = 320, kM = 40;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kM << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">run "
      << r.epoch.run.index << " " << r.epoch.state.label;
  if (r.q_rmse) svg << "  RMSE " << fmt(*r.q_rmse);
  svg << "</text>\n";
  if (r.median.size() == 0) {
    svg << "</svg>\n";
    return svg.str();
  }
  const Series upper = r.median + r.sd;
  const Series lower = r.median - r.sd;
  double lo = lower.minCoeff(), hi = upper.maxCoeff();
  Eigen::Index n = r.median.size();
  if (r.truth && r.truth->size() > 0) {
    lo = std::min(lo, r.truth->minCoeff());
    hi = std::max(hi, r.truth->maxCoeff());
    n = std::max(n, r.truth->size());
  }
  const Scale sx{0.0, static_cast<double>(std::max<Eigen::Index>(n - 1, 1)), kM, kW - kM};
  const Scale sy{lo, hi, kH - kM, kM};

  svg << "<polygon class=\"sd-band\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
  svg << polyline(upper, sx, sy);
  for (Eigen::Index i = lower.size() - 1; i >= 0; --i) {
    svg << ' ' << fmt(sx(static_cast<double>(i)), 2) << "," << fmt(sy(lower[i]), 2);
  }
  svg << "\"/>\n";
  if (r.truth) {
    svg << "<polyline class=\"truth\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\""
        << polyline(*r.truth, sx, sy) << "\"/>\n";
  }
  svg << "<polyline class=\"median\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\""
      << polyline(r.median, sx, sy) << "\"/>\n";
  svg << "<text x=\"" << kM << "\" y=\"" << kH - 10
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(lo, 2) << " .. " << fmt(hi, 2)
      << " A</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string boxplot_svg(const SessionReport& session) {
  std::map<int, std::vector<double>> per_run;
  for (const auto& e : session.epochs) {
    auto& v = per_run[e.epoch.run.index];
    v.insert(v.end(), e.attempt_rmse.begin(), e.attempt_rmse.end());
  }
  std::erase_if(per_run, [](const auto& kv) { return kv.second.empty(); });

  constexpr double kW = 720, kH = 360, kM = 50;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kM << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">"
         "attempt RMSE per run (box) and flank wear (line)</text>\n";
  if (per_run.empty()) {
    svg << "</svg>\n";
    return svg.str();
  }
  double hi = 0.0;
  for (const auto& [run, v] : per_run) hi = std::max(hi, *std::max_element(v.begin(), v.end()));
  double wear_hi = 0.0;
  for (const auto& r : session.runs) {
    if (r.flank_wear_mm) wear_hi = std::max(wear_hi, *r.flank_wear_mm);
  }
  const double slot = (kW - 2 * kM) / static_cast<double>(per_run.size());
  const Scale sy{0.0, hi > 0.0 ? hi : 1.0, kH - kM, kM};
  const Scale sw{0.0, wear_hi > 0.0 ? wear_hi : 1.0, kH - kM, kM};

  std::string wear_points;
  std::size_t k = 0;
  for (const auto& [run, v] : per_run) {
    const BoxStats b = box_stats(v);
    const double cx = kM + slot * (static_cast<double>(k) + 0.5);
    const double half = slot * 0.3;
    svg << "<g class=\"box\" data-run=\"" << run << "\" data-min=\"" << detail::format_shortest(b.min)
        << "\" data-q1=\"" << detail::format_shortest(b.q1) << "\" data-median=\""
        << detail::format_shortest(b.median) << "\" data-q3=\"" << detail::format_shortest(b.q3)
        << "\" data-max=\"" << detail::format_shortest(b.max) << "\">\n";
    svg << "  <line x1=\"" << fmt(cx, 2) << "\" y1=\"" << fmt(sy(b.min), 2) << "\" x2=\""
        << fmt(cx, 2) << "\" y2=\"" << fmt(sy(b.max), 2) << "\" stroke=\"black\"/>\n";
    svg << "  <rect x=\"" << fmt(cx - half, 2) << "\" y=\"" << fmt(sy(b.q3), 2) << "\" width=\""
        << fmt(2 * half, 2) << "\" height=\"" << fmt(sy(b.q1) - sy(b.q3), 2)
        << "\" fill=\"#c6dbef\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << fmt(cx - half, 2) << "\" y1=\"" << fmt(sy(b.median), 2)
        << "\" x2=\"" << fmt(cx + half, 2) << "\" y2=\"" << fmt(sy(b.median), 2)
        << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg << "  <text x=\"" << fmt(cx, 2) << "\" y=\"" << kH - kM + 15
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << run
        << "</text>\n";
    svg << "</g>\n";
    for (const auto& r : session.runs) {
      if (r.run == run && r.flank_wear_mm) {
        if (!wear_points.empty()) wear_points += ' ';
        wear_points += fmt(cx, 2) + "," + fmt(sw(*r.flank_wear_mm), 2);
      }
    }
    ++k;
  }
  if (!wear_points.empty()) {
    svg << "<polyline class=\"wear\" fill=\"none\" stroke=\"#2ca02c\" stroke-dasharray=\"4 2\" "
           "points=\""
        << wear_points << "\"/>\n";
  }
  svg << "<text x=\"" << 5 << "\" y=\"" << kM - 8 << "\" font-family=\"sans-serif\" "
      << "font-size=\"10\">RMSE max " << fmt(hi, 3) << " A</text>\n";
  svg << "<text x=\"" << kW - kM - 80 << "\" y=\"" << kM - 8 << "\" font-family=\"sans-serif\" "
      << "font-size=\"10\" fill=\"#2ca02c\">wear max " << fmt(wear_hi, 3) << " mm</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_report_artifacts(const SessionReport& session,
                                                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& p, const std::string& text) {
    detail::write_file(p.string(), text);
    written.push_back(p);
  };
  emit(out_dir / "table.csv", run_table_csv(session));
  emit(out_dir / "boxplot.svg", boxplot_svg(session));
  for (const auto& e : session.epochs) {
    if (e.median.size() == 0) continue;
    emit(out_dir / ("overlay_run" + std::to_string(e.epoch.run.index) + "_" +
                    e.epoch.state.label + ".svg"),
         overlay_svg(e));
  }
  return written;
}

}  // namespace gendt
