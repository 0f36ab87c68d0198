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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ideatree/cli/commands.hpp"
#include "ideatree/core/run_log.hpp"

namespace ideatree {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ideatree-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

// A finished synthetic run in a fresh directory.
fs::path make_run(const std::string& name, const std::string& config) {
  const fs::path base = temp_dir(name);
  const fs::path cfg = write_text(base / "config.in.json", config);
  std::ostringstream out, err;
  RunCommand cmd;
  cmd.config = cfg;
  cmd.out = base / "run";
  EXPECT_EQ(cmd_run(cmd, out, err), kExitOk) << err.str();
  return base / "run";
}

TEST(LeaderboardTest, CountsStrictlyWorseHumans) {
  const Leaderboard lower = parse_leaderboard("direction: lower\n0.1\n0.2\n0.9\n");
  EXPECT_NEAR(percent_humans_beaten(lower, 0.15), 200.0 / 3.0, 1e-12);
  const Leaderboard higher = parse_leaderboard("direction: higher\n\n0.1\n0.2\n0.9\n");
  EXPECT_NEAR(percent_humans_beaten(higher, 0.15), 100.0 / 3.0, 1e-12);
  // Ties are not beaten.
  EXPECT_DOUBLE_EQ(percent_humans_beaten(higher, 0.2), 100.0 / 3.0);
}

TEST(LeaderboardTest, WorseThanEveryoneIsZero) {
  const Leaderboard b = parse_leaderboard("direction: higher\n0.5\n0.6\n");
  EXPECT_DOUBLE_EQ(percent_humans_beaten(b, 0.1), 0.0);
}

TEST(LeaderboardTest, NoSubmissionIsZero) {
  const Leaderboard b = parse_leaderboard("direction: lower\n0.5\n0.6\n");
  EXPECT_DOUBLE_EQ(percent_humans_beaten(b, std::nullopt), 0.0);
}

TEST(LeaderboardTest, MalformedFilesAreRejected) {
  for (const char* text : {"", "0.1\n0.2\n", "direction: sideways\n0.1\n", "direction: higher\n",
                           "direction: higher\n0.1\nabc\n", "direction: higher\n0.1 0.2\n"}) {
    try {
      parse_leaderboard(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedLeaderboardFile) << text;
    }
  }
}

TEST(ExitCodeTest, MapsErrorsToStatuses) {
  EXPECT_EQ(exit_code_for(ErrorCode::kConfigInvalid), kExitConfigInvalid);
  EXPECT_EQ(exit_code_for(ErrorCode::kInitializationFailure), kExitInitializationFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::kMissingRunArtifacts), kExitMissingArtifacts);
  EXPECT_EQ(exit_code_for(ErrorCode::kCorruptLog), kExitCorruptLog);
  EXPECT_EQ(exit_code_for(ErrorCode::kLogVersionMismatch), kExitCorruptLog);
  EXPECT_EQ(exit_code_for(ErrorCode::kTimeout), kExitFailure);
}

TEST(CmdValidateConfigTest, ReportsUnknownKeys) {
  const fs::path dir = temp_dir("validate");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate_config(write_text(dir / "ok.json", "{\"seed\": 3}"), out, err), kExitOk);
  EXPECT_TRUE(json::parse(out.str()).at("valid").get<bool>());

  std::ostringstream out2, err2;
  EXPECT_EQ(cmd_validate_config(write_text(dir / "bad.json", "{\"bogus\": 1}"), out2, err2),
            kExitConfigInvalid);
  const json e = json::parse(err2.str());
  EXPECT_EQ(e.at("error"), "ConfigInvalid");
  EXPECT_EQ(e.at("errors"), json::array({"bogus: unknown key"}));

  std::ostringstream out3, err3;
  EXPECT_EQ(cmd_validate_config(write_text(dir / "junk.json", "{"), out3, err3),
            kExitConfigInvalid);
}

TEST(CmdRunTest, WritesARunDirectory) {
  const fs::path run = make_run("run", R"({"time_run_minutes": 250, "seed": 2})");
  for (const char* f : {"config.json", "run.log.jsonl", "final.json", "best_artifact.txt",
                        "checkpoints/final.json"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  std::ifstream in(run / "config.json");
  const json cfg = json::parse(in);
  EXPECT_EQ(cfg.at("seed"), 2);
}

TEST(CmdRunTest, SeedAndPortsFlagsOverrideTheConfig) {
  const fs::path base = temp_dir("override");
  const fs::path cfg = write_text(base / "c.json", R"({"time_run_minutes": 0, "seed": 2})");
  std::ostringstream out, err;
  RunCommand cmd;
  cmd.config = cfg;
  cmd.out = base / "run";
  cmd.seed = 11;
  cmd.ports = "synthetic";
  ASSERT_EQ(cmd_run(cmd, out, err), kExitOk) << err.str();
  std::ifstream in(base / "run" / "config.json");
  EXPECT_EQ(json::parse(in).at("seed"), 11);
}

TEST(CmdRunTest, DefaultBudgetIsHonored) {
  const fs::path base = temp_dir("default-budget");
  RunCommand cmd;
  cmd.out = base / "run";
  cmd.config = write_text(base / "c.json", "{}");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(cmd, out, err), kExitOk) << err.str();
  const RunSummary s = summarize_run(load_run_log(base / "run"));
  EXPECT_DOUBLE_EQ(s.budget, 360.0);
  EXPECT_GE(s.elapsed, 360.0);
}

TEST(CmdRunTest, UnknownKeyFailsWithConfigInvalid) {
  const fs::path base = temp_dir("unknown");
  RunCommand cmd;
  cmd.config = write_text(base / "c.json", R"({"time_run_minutes": 5, "colour": "blue"})");
  cmd.out = base / "run";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(cmd, out, err), kExitConfigInvalid);
  EXPECT_NE(err.str().find("colour: unknown key"), std::string::npos);
  EXPECT_FALSE(fs::exists(base / "run"));
}

TEST(CmdRunTest, InitializationFailureHasItsOwnStatus) {
  const fs::path base = temp_dir("init-fail");
  RunCommand cmd;
  cmd.config = write_text(
      base / "c.json",
      R"({"time_run_minutes": 5, "synthetic": {"coder": {"bug_probability": 1, "fix_probability": 0}}})");
  cmd.out = base / "run";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(cmd, out, err), kExitInitializationFailure);
  EXPECT_NE(err.str().find("InitializationFailure"), std::string::npos);
}

TEST(CmdReplayTest, IntactRunReplays) {
  const fs::path run = make_run("replay", R"({"time_run_minutes": 250, "seed": 4})");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_replay(run, out, err), kExitOk) << err.str();
}

TEST(CmdReplayTest, DeletedCheckpointIsMissingArtifacts) {
  const fs::path run = make_run("replay-missing", R"({"time_run_minutes": 100})");
  fs::remove(run / "checkpoints" / "final.json");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_replay(run, out, err), kExitMissingArtifacts);
}

TEST(CmdReplayTest, TamperedLogLineIsCorrupt) {
  const fs::path run = make_run("replay-tamper", R"({"time_run_minutes": 100})");
  std::ifstream in(run / "run.log.jsonl");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  in.close();
  // Change a score without updating the digest chain.
  for (auto& l : lines) {
    json r = json::parse(l);
    if (r.at("type") == event::kNodeEvaluated) {
      r["raw_score"] = r["raw_score"].get<double>() + 1.0;
      l = r.dump();
      break;
    }
  }
  std::ofstream o(run / "run.log.jsonl", std::ios::trunc);
  for (const auto& l : lines) o << l << '\n';
  o.close();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_replay(run, out, err), kExitCorruptLog);
}

TEST(CmdReplayTest, AlteredCheckpointIsAMismatch) {
  const fs::path run = make_run("replay-mismatch", R"({"time_run_minutes": 100})");
  std::ofstream(run / "checkpoints" / "final.json", std::ios::app) << " ";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_replay(run, out, err), kExitCorruptLog);
}

TEST(CmdReportTest, ProgressRowsAreMonotone) {
  const fs::path run = make_run("progress", R"({"time_run_minutes": 600, "seed": 5})");
  const auto rows = progress_rows(load_run_log(run));
  ASSERT_GE(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(*rows[i].best_oriented_score, *rows[i - 1].best_oriented_score);
    EXPECT_GE(rows[i].time, rows[i - 1].time);
    EXPECT_GE(rows[i].mt_count, rows[i - 1].mt_count);
  }
  EXPECT_EQ(rows.front().iteration, 0u);
  EXPECT_EQ(rows.front().fe_count, 2u);

  std::ostringstream out, err;
  ReportCommand cmd;
  cmd.runs = {run};
  ASSERT_EQ(cmd_report(cmd, out, err), kExitOk) << err.str();
  std::ifstream csv(run / "report" / "progress.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "run,iteration,time,best_oriented_score,fe_count,mt_count,merged_count");
  // Same inputs, same bytes.
  std::stringstream first;
  first << std::ifstream(run / "report" / "progress.csv").rdbuf();
  std::ostringstream out2, err2;
  ASSERT_EQ(cmd_report(cmd, out2, err2), kExitOk);
  std::stringstream second;
  second << std::ifstream(run / "report" / "progress.csv").rdbuf();
  EXPECT_EQ(first.str(), second.str());
}

TEST(CmdReportTest, AccelerationComparesPassesToTheUnacceleratedRun) {
  const fs::path slow = make_run(
      "accel-slow",
      R"({"time_run_minutes": 1500, "debug_acceleration": false, "predict_before_evaluate": false})");
  const fs::path fast = make_run("accel-fast", R"({"time_run_minutes": 1500})");
  const fs::path out_dir = temp_dir("accel-report");
  ReportCommand cmd;
  cmd.runs = {fast, slow};
  cmd.mode = "acceleration";
  cmd.out = out_dir;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_report(cmd, out, err), kExitOk) << err.str();
  std::ifstream in(out_dir / "summary.json");
  const json doc = json::parse(in);
  EXPECT_DOUBLE_EQ(doc.at("runs")[1].at("speedup").get<double>(), 1.0);
  EXPECT_GT(doc.at("runs")[0].at("speedup").get<double>(), 1.0);
}

TEST(CmdReportTest, AblationListsBestScoresAndHumansBeaten) {
  const fs::path with = make_run("abl-merge", R"({"time_run_minutes": 300})");
  const fs::path without = make_run("abl-add", R"({"time_run_minutes": 300, "merging": false})");
  const fs::path dir = temp_dir("abl-report");
  ReportCommand cmd;
  cmd.runs = {with, without};
  cmd.mode = "ablation";
  cmd.out = dir;
  cmd.leaderboard = write_text(dir / "board.txt", "direction: higher\n-100\n100\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_report(cmd, out, err), kExitOk) << err.str();
  const json doc = json::parse(out.str());
  EXPECT_TRUE(doc.at("runs")[0].at("merging").get<bool>());
  EXPECT_FALSE(doc.at("runs")[1].at("merging").get<bool>());
  EXPECT_DOUBLE_EQ(doc.at("runs")[0].at("percent_humans_beaten").get<double>(), 50.0);
  EXPECT_TRUE(fs::exists(dir / "ablation.csv"));
  EXPECT_TRUE(fs::exists(dir / "humans_beaten.csv"));
}

TEST(CmdReportTest, MissingRunIsReported) {
  ReportCommand cmd;
  cmd.runs = {temp_dir("empty-run")};
  std::ostringstream out, err;
  EXPECT_EQ(cmd_report(cmd, out, err), kExitMissingArtifacts);
}

TEST(CmdReportTest, MalformedLeaderboardIsReported) {
  const fs::path run = make_run("bad-board", R"({"time_run_minutes": 0})");
  ReportCommand cmd;
  cmd.runs = {run};
  cmd.leaderboard = write_text(run.parent_path() / "board.txt", "0.1\n");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_report(cmd, out, err), kExitFailure);
  EXPECT_NE(err.str().find("MalformedLeaderboardFile"), std::string::npos);
}

}  // namespace
}  // namespace ideatree
