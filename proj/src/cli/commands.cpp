// Copyright 2026 The Ideatree Authors.
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


#include "ideatree/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ideatree/core/run_log.hpp"
#include "ideatree/orchestrator/run.hpp"
#include "ideatree/search/selection.hpp"

namespace ideatree {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path, ErrorCode missing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(missing, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

void report_error(std::ostream& err, ErrorCode code, const std::string& message,
                  const std::vector<std::string>& errors = {}) {
  err << json{{"error", to_string(code)}, {"message", message}, {"errors", errors}}.dump()
      << '\n';
}

// Runs `body`, turning errors into an error document and exit status.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    report_error(err, e.code(), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << json{{"error", "Exception"}, {"message", e.what()}, {"errors", json::array()}}.dump()
        << '\n';
    return kExitFailure;
  }
}

MetricSpec metric_of(const std::vector<json>& log) {
  MetricSpec m;
  for (const auto& r : log) {
    if (r.at("type") == event::kRunFinished && r.contains("metric")) {
      m.name = r["metric"].value("name", m.name);
      m.direction = direction_from_string(r["metric"].value("direction", "HigherBetter"));
      return m;
    }
  }
  for (const auto& r : log) {
    if (r.at("type") == event::kSetupCompleted && r.contains("metric")) {
      m.name = r["metric"].value("name", m.name);
      m.direction = direction_from_string(r["metric"].value("direction", "HigherBetter"));
    }
  }
  return m;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigInvalid: return kExitConfigInvalid;
    case ErrorCode::kInitializationFailure: return kExitInitializationFailure;
    case ErrorCode::kMissingRunArtifacts: return kExitMissingArtifacts;
    case ErrorCode::kCorruptLog:
    case ErrorCode::kLogVersionMismatch: return kExitCorruptLog;
    default: return kExitFailure;
  }
}

std::vector<json> load_run_log(const fs::path& run_dir) {
  return RunLog::load(run_dir / "run.log.jsonl");
}

json to_json(const RunSummary& s) {
  return {{"run", s.run},
          {"metric", {{"name", s.metric.name}, {"direction", to_string(s.metric.direction)}}},
          {"budget", s.budget},
          {"passes", s.passes},
          {"elapsed", s.elapsed},
          {"best", s.best ? json(*s.best) : json()},
          {"best_score", optional_json(s.best_score)},
          {"best_oriented_score", optional_json(s.best_oriented_score)},
          {"merging", s.merging},
          {"debug_acceleration", s.debug_acceleration},
          {"predict_before_evaluate", s.predict_before_evaluate},
          {"ports", s.ports},
          {"seed", s.seed},
          {"finished", s.finished}};
}

RunSummary summarize_run(const std::vector<json>& log, std::string name) {
  RunSummary s;
  s.run = std::move(name);
  s.metric = metric_of(log);
  bool started = false;
  for (const auto& r : log) {
    const auto& type = r.at("type");
    if (type == event::kRunStarted) {
      started = true;
      const json& c = r.at("config");
      s.budget = c.value("time_run_minutes", 0.0);
      s.merging = c.value("merging", true);
      s.debug_acceleration = c.value("debug_acceleration", true);
      s.predict_before_evaluate = c.value("predict_before_evaluate", true);
      s.ports = c.value("ports", "synthetic");
      s.seed = c.value("seed", std::uint64_t{0});
    } else if (type == event::kRunFinished) {
      s.finished = true;
      s.passes = r.value("passes", std::size_t{0});
      s.elapsed = r.value("elapsed", 0.0);
      if (r.contains("best") && !r["best"].is_null()) s.best = r["best"].get<std::uint64_t>();
      if (r.contains("best_score") && !r["best_score"].is_null()) {
        s.best_score = r["best_score"].get<double>();
        s.best_oriented_score = orient(*s.best_score, s.metric.direction).value;
      }
    }
  }
  if (!started) throw Error(ErrorCode::kCorruptLog, "log has no RunStarted record");
  return s;
}

std::vector<ReportRow> progress_rows(const std::vector<json>& log) {
  const MetricSpec metric = metric_of(log);
  std::vector<ReportRow> rows;
  ReportRow cur;
  for (const auto& r : log) {
    const auto& type = r.at("type");
    if (type == event::kNodeProposed) {
      const json& n = r.at("node");
      const NodeLevel level = level_from_string(n.at("level").get<std::string>());
      if (level == NodeLevel::kFe) ++cur.fe_count;
      if (level == NodeLevel::kMt) ++cur.mt_count;
      if (n.at("provenance").at("kind") == "Merged") ++cur.merged_count;
    } else if (type == event::kNodeEvaluated) {
      const double s = orient(r.at("raw_score").get<double>(), metric.direction).value;
      if (!cur.best_oriented_score || s > *cur.best_oriented_score) cur.best_oriented_score = s;
    } else if (type == event::kIterationAdvanced) {
      cur.iteration = r.at("iteration").get<std::uint64_t>();
    } else if ((type == event::kCheckpointWritten && r.value("stage", "") == "initialization") ||
               type == event::kStageFinished) {
      cur.time = r.at("t").get<double>();
      rows.push_back(cur);
    }
  }
  return rows;
}

Leaderboard parse_leaderboard(std::string_view text) {
  Leaderboard board;
  bool header = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto malformed = [&](const std::string& why) {
    return Error(ErrorCode::kMalformedLeaderboardFile,
                 "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!header) {
      constexpr std::string_view kKey = "direction:";
      if (t.rfind(kKey, 0) != 0) throw malformed("expected a \"direction:\" header");
      try {
        board.direction = direction_from_string(trim(std::string_view(t).substr(kKey.size())));
      } catch (const Error& e) {
        throw malformed(e.what());
      }
      header = true;
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
      throw malformed("not a number: '" + t + "'");
    }
    board.scores.push_back(v);
  }
  if (!header) throw malformed("missing \"direction:\" header");
  if (board.scores.empty()) throw malformed("no scores");
  return board;
}

double percent_humans_beaten(const Leaderboard& board, std::optional<double> best) {
  if (!best || board.scores.empty()) return 0.0;
  const auto worse = std::count_if(board.scores.begin(), board.scores.end(), [&](double h) {
    return board.direction == Direction::kHigherBetter ? h < *best : h > *best;
  });
  return 100.0 * static_cast<double>(worse) / static_cast<double>(board.scores.size());
}

int cmd_validate_config(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    json doc;
    try {
      doc = json::parse(read_file(config, ErrorCode::kIoError));
    } catch (const json::exception& e) {
      report_error(err, ErrorCode::kConfigInvalid, "config is not JSON", {e.what()});
      return kExitConfigInvalid;
    }
    const ConfigParse parsed = parse_run_config(doc);
    if (!parsed.config) {
      report_error(err, ErrorCode::kConfigInvalid, "invalid config", parsed.errors);
      return kExitConfigInvalid;
    }
    out << json{{"valid", true}, {"config", to_json(*parsed.config)}}.dump() << '\n';
    return kExitOk;
  });
}

int cmd_run(const RunCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    json doc = json::object();
    if (cmd.config) {
      try {
        doc = json::parse(read_file(*cmd.config, ErrorCode::kIoError));
      } catch (const json::exception& e) {
        report_error(err, ErrorCode::kConfigInvalid, "config is not JSON", {e.what()});
        return kExitConfigInvalid;
      }
    }
    if (doc.is_object()) {
      if (cmd.seed) doc["seed"] = *cmd.seed;
      if (cmd.ports) doc["ports"] = *cmd.ports;
    }
    const ConfigParse parsed = parse_run_config(doc);
    if (!parsed.config) {
      report_error(err, ErrorCode::kConfigInvalid, "invalid config", parsed.errors);
      return kExitConfigInvalid;
    }
    const RunOutcome outcome = execute_run(*parsed.config, {cmd.dataset, cmd.out});
    json summary = to_json(outcome.result);
    summary["run_dir"] = cmd.out.string();
    out << summary.dump() << '\n';
    return kExitOk;
  });
}

int cmd_replay(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto log = load_run_log(run_dir);
    const std::string expected =
        read_file(run_dir / "checkpoints" / "final.json", ErrorCode::kMissingRunArtifacts);
    const std::string actual = snapshot(replay(log));
    const bool equal = actual == expected;
    if (!equal) {
      report_error(err, ErrorCode::kCorruptLog,
                   "replayed tree differs from checkpoints/final.json");
      return kExitCorruptLog;
    }
    out << json{{"replay", "ok"}, {"records", log.size()}}.dump() << '\n';
    return kExitOk;
  });
}

int cmd_report(const ReportCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cmd.runs.empty()) throw Error(ErrorCode::kMissingRunArtifacts, "no run directory given");
    if (cmd.mode != "progress" && cmd.mode != "ablation" && cmd.mode != "acceleration") {
      throw Error(ErrorCode::kConfigInvalid, "mode: must be progress, ablation or acceleration");
    }
    std::optional<Leaderboard> board;
    if (cmd.leaderboard) {
      board = parse_leaderboard(read_file(*cmd.leaderboard, ErrorCode::kMalformedLeaderboardFile));
    }
    std::vector<std::vector<json>> logs;
    std::vector<RunSummary> summaries;
    for (const auto& dir : cmd.runs) {
      logs.push_back(load_run_log(dir));
      summaries.push_back(summarize_run(logs.back(), dir.filename().string()));
      if (!summaries.back().finished) {
        throw Error(ErrorCode::kMissingRunArtifacts, dir.string() + ": run did not finish");
      }
    }
    const fs::path out_dir = cmd.out.value_or(cmd.runs.front() / "report");
    fs::create_directories(out_dir);

    json doc = {{"mode", cmd.mode}, {"runs", json::array()}};
    for (const auto& s : summaries) {
      json j = to_json(s);
      if (board) j["percent_humans_beaten"] = percent_humans_beaten(*board, s.best_score);
      doc["runs"].push_back(std::move(j));
    }

    std::string table;
    if (cmd.mode == "progress") {
      table = "run,iteration,time,best_oriented_score,fe_count,mt_count,merged_count\n";
      for (std::size_t i = 0; i < logs.size(); ++i) {
        for (const auto& row : progress_rows(logs[i])) {
          table += summaries[i].run + "," + std::to_string(row.iteration) + "," +
                   csv_number(row.time) + "," + csv_number(row.best_oriented_score) + "," +
                   std::to_string(row.fe_count) + "," + std::to_string(row.mt_count) + "," +
                   std::to_string(row.merged_count) + "\n";
        }
      }
    } else if (cmd.mode == "acceleration") {
      // Speedups are relative to the first run without either acceleration,
      // or to the first run when there is none.
      std::size_t base = 0;
      for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (!summaries[i].debug_acceleration && !summaries[i].predict_before_evaluate) {
          base = i;
          break;
        }
      }
      const double base_passes = static_cast<double>(summaries[base].passes);
      table = "run,debug_acceleration,predict_before_evaluate,budget,passes,elapsed,speedup\n";
      for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        const std::optional<double> speedup =
            base_passes > 0 ? std::optional<double>(static_cast<double>(s.passes) / base_passes)
                            : std::nullopt;
        doc["runs"][i]["speedup"] = optional_json(speedup);
        table += s.run + "," + (s.debug_acceleration ? "true" : "false") + "," +
                 (s.predict_before_evaluate ? "true" : "false") + "," + csv_number(s.budget) +
                 "," + std::to_string(s.passes) + "," + csv_number(s.elapsed) + "," +
                 csv_number(speedup) + "\n";
      }
    } else {
      table = "run,merging,ports,passes,best_score,best_oriented_score\n";
      for (const auto& s : summaries) {
        table += s.run + "," + (s.merging ? "true" : "false") + "," + s.ports + "," +
                 std::to_string(s.passes) + "," + csv_number(s.best_score) + "," +
                 csv_number(s.best_oriented_score) + "\n";
      }
    }
    write_file(out_dir / (cmd.mode + ".csv"), table);
    if (board) {
      std::string beaten = "run,best_score,percent_humans_beaten\n";
      for (const auto& s : summaries) {
        beaten += s.run + "," + csv_number(s.best_score) + "," +
                  csv_number(percent_humans_beaten(*board, s.best_score)) + "\n";
      }
      write_file(out_dir / "humans_beaten.csv", beaten);
    }
    write_file(out_dir / "summary.json", doc.dump(2) + "\n");
    doc["out"] = out_dir.string();
    out << doc.dump() << '\n';
    return kExitOk;
  });
}

}  // namespace ideatree
