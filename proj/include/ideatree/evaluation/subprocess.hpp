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


// Runs code artifacts as child processes. Each evaluation gets its own
// workspace directory under the scratch root:
//
//   <scratch>/node-<id>-<mode>-<seq>/
//     <artifact_name>   the code, as given
//     stdout.log        captured standard output
//     stderr.log        captured standard error
//     <result_name>     written by the artifact: one number
//
// The child runs in its own process group with the workspace as working
// directory and a minimal environment:
//
//   DATA_DIR         read-only input data
//   RESULT_FILE      absolute path the artifact must write its score to
//   SUBSET_FRACTION  fraction of the training data to use
//   SCRATCH_DIR      the workspace itself
//   PATH, HOME       copied from the parent
//
// The parent enforces the wall-clock cap by killing the whole group.

#ifndef IDEATREE_EVALUATION_SUBPROCESS_HPP_
#define IDEATREE_EVALUATION_SUBPROCESS_HPP_

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "ideatree/evaluation/port.hpp"
#include "json.hpp"

namespace ideatree {

struct SubprocessConfig {
  std::filesystem::path data_dir;
  std::filesystem::path scratch_dir;
  // Program that runs the artifact, resolved against PATH when it has no
  // slash. The artifact path is appended to interpreter_args.
  std::string interpreter = "python3";
  std::vector<std::string> interpreter_args;
  std::string artifact_name = "solution.py";
  std::string result_name = "result.txt";
  // Wall-clock caps in minutes.
  double full_timeout_minutes = 30.0;
  double debug_timeout_minutes = 30.0;
  // When non-empty, a successful run must also leave submission_name in the
  // workspace with at least these header columns.
  std::vector<std::string> submission_columns;
  std::string submission_name = "submission.csv";
  // Bytes of captured output kept in failure reports.
  std::size_t max_report_bytes = 4096;

  // Throws ConfigInvalid.
  void validate() const;
};

SubprocessConfig subprocess_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SubprocessConfig& c);

// Failure classes for a nonzero exit are taken from the last non-blank line
// of stderr when it reads "SomeError: message" (the usual traceback tail);
// otherwise the class is "NonzeroExit". Cost is elapsed minutes.
class SubprocessEvaluator final : public EvaluationPort {
 public:
  explicit SubprocessEvaluator(SubprocessConfig config);

  EvalOutcome evaluate(const EvalRequest& request) override;

  const SubprocessConfig& config() const noexcept { return config_; }

 private:
  SubprocessConfig config_;
  std::atomic<std::uint64_t> sequence_{0};
};

// Splits "Class: message" from the tail of an error stream. Returns
// {"", ""} when no line qualifies.
std::pair<std::string, std::string> parse_error_tail(std::string_view stderr_text);

// Parses a result file holding a single finite number (surrounding
// whitespace allowed).
std::optional<double> parse_result_text(std::string_view text);

}  // namespace ideatree

#endif  // IDEATREE_EVALUATION_SUBPROCESS_HPP_
