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


// Command implementations behind the ideatree executable, plus the report
// computations they share. Every report is computed from run logs alone.

#ifndef IDEATREE_CLI_COMMANDS_HPP_
#define IDEATREE_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ideatree/core/error.hpp"
#include "ideatree/core/tree.hpp"
#include "json.hpp"

namespace ideatree {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitInitializationFailure = 3;
inline constexpr int kExitMissingArtifacts = 4;
inline constexpr int kExitCorruptLog = 5;

int exit_code_for(ErrorCode code);

// Run log of a run directory. Throws MissingRunArtifacts, CorruptLog and
// LogVersionMismatch.
std::vector<nlohmann::json> load_run_log(const std::filesystem::path& run_dir);

struct ReportRow {
  std::uint64_t iteration = 0;
  double time = 0.0;
  std::optional<double> best_oriented_score;
  std::size_t fe_count = 0;
  std::size_t mt_count = 0;
  std::size_t merged_count = 0;
};

struct RunSummary {
  std::string run;
  MetricSpec metric;
  double budget = 0.0;
  std::size_t passes = 0;
  double elapsed = 0.0;
  std::optional<std::uint64_t> best;
  std::optional<double> best_score;
  std::optional<double> best_oriented_score;
  bool merging = true;
  bool debug_acceleration = true;
  bool predict_before_evaluate = true;
  std::string ports;
  std::uint64_t seed = 0;
  bool finished = false;
};

nlohmann::json to_json(const RunSummary& s);

// Throws CorruptLog when the log has no RunStarted record.
RunSummary summarize_run(const std::vector<nlohmann::json>& log, std::string name = "");

// One row after initialization and one per finished stage.
std::vector<ReportRow> progress_rows(const std::vector<nlohmann::json>& log);

// A leaderboard file: a "direction: higher|lower" line, then one human score
// per line. Blank lines are ignored.
struct Leaderboard {
  Direction direction = Direction::kHigherBetter;
  std::vector<double> scores;
};

// Throws MalformedLeaderboardFile.
Leaderboard parse_leaderboard(std::string_view text);

// Percent of leaderboard scores strictly worse than `best`; 0 when the run
// produced no valid submission.
double percent_humans_beaten(const Leaderboard& board, std::optional<double> best);

struct RunCommand {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> dataset;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ports;
};

struct ReportCommand {
  std::vector<std::filesystem::path> runs;
  std::string mode = "progress";
  std::optional<std::filesystem::path> leaderboard;
  // Defaults to <first run>/report.
  std::optional<std::filesystem::path> out;
};

// Each command writes a JSON document to `out` on success and a JSON error
// document ({"error", "message", "errors"}) to `err` otherwise, and returns
// the exit status.
int cmd_run(const RunCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_validate_config(const std::filesystem::path& config, std::ostream& out,
                        std::ostream& err);
int cmd_replay(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);
int cmd_report(const ReportCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace ideatree

#endif  // IDEATREE_CLI_COMMANDS_HPP_
