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


// Pipeline setup: four stages that turn a dataset directory into a task
// description, a metric, a validation split and a baseline. Default
// implementations work from the dataset layout
//
//   <dataset>/task.txt               free text; optional lines
//                                    "metric: <name>",
//                                    "direction: higher|lower",
//                                    "baseline: <number>"
//   <dataset>/train.csv              header row plus one row per example
//   <dataset>/sample_submission.csv  optional; its header lists the
//                                    required submission columns

#ifndef IDEATREE_ORCHESTRATOR_SETUP_HPP_
#define IDEATREE_ORCHESTRATOR_SETUP_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ideatree/core/run_log.hpp"
#include "ideatree/core/tree.hpp"
#include "json.hpp"

namespace ideatree {

struct TaskSpec {
  std::filesystem::path dataset_dir;
  std::string description;
  std::vector<std::string> columns;
  std::uint64_t rows = 0;
  std::optional<std::string> metric_name;
  std::optional<Direction> direction;
  std::optional<double> baseline_hint;
  std::vector<std::string> submission_columns;
};

struct MetricPlan {
  MetricSpec metric;
  // Columns every submission must carry.
  std::vector<std::string> submission_columns;
};

struct SplitPlan {
  std::string strategy;
  double validation_fraction = 0.2;
  // 0 for the first split, k for the k-th alternative.
  std::size_t attempt = 0;
  // Set when the data exceeds the size threshold; training then uses
  // subset_rows rows.
  bool subset = false;
  std::uint64_t subset_rows = 0;
  std::string notes;
};

struct BaselineResult {
  enum class Verdict { kSplitOk, kResplitRequested };
  std::optional<double> score;
  Verdict verdict = Verdict::kSplitOk;
  std::string reason;
};

class Reader {
 public:
  virtual ~Reader() = default;
  virtual TaskSpec read(const std::filesystem::path& dataset) = 0;
};

class MetricStage {
 public:
  virtual ~MetricStage() = default;
  virtual MetricPlan define(const TaskSpec& task) = 0;
};

class Validator {
 public:
  virtual ~Validator() = default;
  // attempt counts re-invocations: an alternative strategy each time.
  virtual SplitPlan split(const TaskSpec& task, std::size_t attempt) = 0;
};

class Baseliner {
 public:
  virtual ~Baseliner() = default;
  virtual BaselineResult baseline(const TaskSpec& task, const SplitPlan& split) = 0;
};

struct SetupStages {
  Reader& reader;
  MetricStage& metric;
  Validator& validator;
  Baseliner& baseliner;
};

struct SetupResult {
  TaskSpec task;
  MetricPlan metric;
  SplitPlan split;
  BaselineResult baseline;
  // Validator invocations, including the first.
  std::size_t validator_runs = 0;
};

nlohmann::json to_json(const SetupResult& r);

// Runs Reader, Metric, Validator and Baseliner in order. A resplit request
// reruns the Validator with the next attempt number, at most max_resplits
// times. Data with more rows than size_threshold gets the subset flag.
// Logs SetupCompleted. Throws StageFailure naming the stage that threw and
// ResplitsExhausted.
SetupResult pipeline_setup(const std::filesystem::path& dataset, SetupStages stages,
                           std::size_t max_resplits, std::uint64_t size_threshold,
                           RunLog* log = nullptr);

// Reads task.txt, the train.csv header and row count, and the
// sample_submission.csv header.
class FileReader final : public Reader {
 public:
  TaskSpec read(const std::filesystem::path& dataset) override;
};

// Metric from the task's declarations; "score", higher is better, when it
// has none.
class DeclaredMetric final : public MetricStage {
 public:
  MetricPlan define(const TaskSpec& task) override;
};

// Holdout first, then the alternatives in a fixed order: stratified
// holdout, 5-fold, 3-fold and a larger holdout.
class HoldoutValidator final : public Validator {
 public:
  explicit HoldoutValidator(double validation_fraction = 0.2)
      : validation_fraction_(validation_fraction) {}
  SplitPlan split(const TaskSpec& task, std::size_t attempt) override;

 private:
  double validation_fraction_;
};

// Requests a resplit while the validation part would hold fewer than
// min_validation_rows rows. The score is the task's declared baseline,
// if any.
class RowCountBaseliner final : public Baseliner {
 public:
  explicit RowCountBaseliner(std::uint64_t min_validation_rows = 1)
      : min_validation_rows_(min_validation_rows) {}
  BaselineResult baseline(const TaskSpec& task, const SplitPlan& split) override;

 private:
  std::uint64_t min_validation_rows_;
};

// Writes a dataset in the layout above: `rows` rows of seeded numeric
// features and a binary target.
void write_synthetic_dataset(const std::filesystem::path& dir, std::uint64_t rows,
                             std::uint64_t seed);

}  // namespace ideatree

#endif  // IDEATREE_ORCHESTRATOR_SETUP_HPP_
