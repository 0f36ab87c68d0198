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


#include "ideatree/orchestrator/setup.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "ideatree/core/error.hpp"
#include "ideatree/core/rng.hpp"
#include "ideatree/generation/checker.hpp"

namespace ideatree {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kStageFailure) throw;
    throw Error(ErrorCode::kStageFailure, std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kStageFailure, std::string(name) + ": " + e.what());
  }
}

}  // namespace

json to_json(const SetupResult& r) {
  return {{"task",
           {{"dataset_dir", r.task.dataset_dir.string()},
            {"description", r.task.description},
            {"columns", r.task.columns},
            {"rows", r.task.rows},
            {"submission_columns", r.task.submission_columns}}},
          {"metric",
           {{"name", r.metric.metric.name},
            {"direction", to_string(r.metric.metric.direction)},
            {"submission_columns", r.metric.submission_columns}}},
          {"split",
           {{"strategy", r.split.strategy},
            {"validation_fraction", r.split.validation_fraction},
            {"attempt", r.split.attempt},
            {"subset", r.split.subset},
            {"subset_rows", r.split.subset_rows},
            {"notes", r.split.notes}}},
          {"baseline",
           {{"score", r.baseline.score ? json(*r.baseline.score) : json()},
            {"verdict", r.baseline.verdict == BaselineResult::Verdict::kSplitOk
                            ? "SplitOk"
                            : "ResplitRequested"}}},
          {"validator_runs", r.validator_runs}};
}

SetupResult pipeline_setup(const fs::path& dataset, SetupStages stages, std::size_t max_resplits,
                           std::uint64_t size_threshold, RunLog* log) {
  SetupResult r;
  r.task = run_stage("Reader", [&] { return stages.reader.read(dataset); });
  r.metric = run_stage("Metric", [&] { return stages.metric.define(r.task); });
  auto split = [&](std::size_t attempt) {
    SplitPlan plan = run_stage("Validator", [&] { return stages.validator.split(r.task, attempt); });
    ++r.validator_runs;
    if (r.task.rows > size_threshold) {
      plan.subset = true;
      plan.subset_rows = size_threshold;
    }
    return plan;
  };
  r.split = split(0);
  r.baseline = run_stage("Baseliner", [&] { return stages.baseliner.baseline(r.task, r.split); });
  while (r.baseline.verdict == BaselineResult::Verdict::kResplitRequested) {
    if (r.validator_runs > max_resplits) {
      throw Error(ErrorCode::kResplitsExhausted,
                  "baseliner still requests a resplit after " +
                      std::to_string(r.validator_runs) + " splits: " + r.baseline.reason);
    }
    r.split = split(r.validator_runs);
    r.baseline = run_stage("Baseliner", [&] { return stages.baseliner.baseline(r.task, r.split); });
  }
  if (log) log->append(event::kSetupCompleted, to_json(r));
  return r;
}

TaskSpec FileReader::read(const fs::path& dataset) {
  TaskSpec t;
  t.dataset_dir = dataset;
  const auto task = read_text(dataset / "task.txt");
  if (!task) throw Error(ErrorCode::kIoError, "missing " + (dataset / "task.txt").string());
  std::istringstream lines(*task);
  std::string line, description;
  while (std::getline(lines, line)) {
    const std::string l = trim(line);
    auto value_of = [&](std::string_view key) -> std::optional<std::string> {
      if (l.size() > key.size() && l.compare(0, key.size(), key) == 0) {
        return trim(std::string_view(l).substr(key.size()));
      }
      return std::nullopt;
    };
    if (auto v = value_of("metric:")) {
      t.metric_name = *v;
    } else if (auto d = value_of("direction:")) {
      t.direction = direction_from_string(*d);
    } else if (auto b = value_of("baseline:")) {
      char* end = nullptr;
      const double x = std::strtod(b->c_str(), &end);
      if (end == b->c_str() || !std::isfinite(x)) {
        throw Error(ErrorCode::kMalformedDocument, "task.txt: bad baseline '" + *b + "'");
      }
      t.baseline_hint = x;
    } else {
      description += line + "\n";
    }
  }
  t.description = trim(description);
  const auto train = read_text(dataset / "train.csv");
  if (!train) throw Error(ErrorCode::kIoError, "missing " + (dataset / "train.csv").string());
  t.columns = csv_header(*train);
  std::uint64_t newlines = 0;
  for (char c : *train) newlines += c == '\n';
  const bool trailing = !train->empty() && train->back() == '\n';
  const std::uint64_t lines_total = newlines + (trailing || train->empty() ? 0 : 1);
  t.rows = lines_total > 0 ? lines_total - 1 : 0;
  if (const auto sample = read_text(dataset / "sample_submission.csv")) {
    t.submission_columns = csv_header(*sample);
  }
  return t;
}

MetricPlan DeclaredMetric::define(const TaskSpec& task) {
  MetricPlan p;
  p.metric.name = task.metric_name.value_or("score");
  p.metric.direction = task.direction.value_or(Direction::kHigherBetter);
  p.submission_columns = task.submission_columns;
  return p;
}

SplitPlan HoldoutValidator::split(const TaskSpec& task, std::size_t attempt) {
  struct Strategy {
    const char* name;
    double fraction;
  };
  static constexpr Strategy kStrategies[] = {{"holdout", 0.0},
                                             {"stratified_holdout", 0.0},
                                             {"kfold_5", 0.2},
                                             {"kfold_3", 1.0 / 3.0},
                                             {"holdout_30", 0.3}};
  const Strategy& s = kStrategies[attempt % std::size(kStrategies)];
  SplitPlan p;
  p.strategy = s.name;
  p.validation_fraction = s.fraction > 0.0 ? s.fraction : validation_fraction_;
  p.attempt = attempt;
  p.notes = std::to_string(task.rows) + " rows";
  return p;
}

BaselineResult RowCountBaseliner::baseline(const TaskSpec& task, const SplitPlan& split) {
  BaselineResult r;
  r.score = task.baseline_hint;
  const auto validation_rows =
      static_cast<std::uint64_t>(std::floor(static_cast<double>(task.rows) * split.validation_fraction));
  if (validation_rows < min_validation_rows_) {
    r.verdict = BaselineResult::Verdict::kResplitRequested;
    r.reason = split.strategy + " leaves " + std::to_string(validation_rows) + " validation rows";
  }
  return r;
}

void write_synthetic_dataset(const fs::path& dir, std::uint64_t rows, std::uint64_t seed) {
  fs::create_directories(dir);
  std::ofstream(dir / "task.txt") << "Synthetic binary classification.\nmetric: accuracy\n"
                                     "direction: higher\n";
  std::ofstream train(dir / "train.csv");
  train << "id,x0,x1,target\n";
  Rng rng(seed);
  char buf[96];
  for (std::uint64_t i = 0; i < rows; ++i) {
    const double x0 = rng.normal(), x1 = rng.normal();
    std::snprintf(buf, sizeof buf, "%llu,%.6f,%.6f,%d\n", static_cast<unsigned long long>(i), x0,
                  x1, x0 + x1 > 0 ? 1 : 0);
    train << buf;
  }
  std::ofstream(dir / "sample_submission.csv") << "id,target\n0,0\n";
}

}  // namespace ideatree
