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


#ifndef IDEATREE_EVALUATION_PORT_HPP_
#define IDEATREE_EVALUATION_PORT_HPP_

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "ideatree/core/error.hpp"
#include "ideatree/core/tree.hpp"

namespace ideatree {

enum class EvalMode {
  // The score of record.
  kFull,
  // Fast-mode run used to surface errors; its score is never recorded.
  kDebug,
};

std::string_view to_string(EvalMode mode);

struct FailureReport {
  ErrorCode code = ErrorCode::kEvaluationFailure;
  std::string error_class;
  std::string message;
  // Captured stdout/stderr, possibly truncated.
  std::string output;
};

struct EvalOutcome {
  std::optional<double> score;
  std::optional<FailureReport> failure;
  // In clock units (minutes).
  double cost = 0.0;

  bool ok() const noexcept { return score.has_value(); }
};

struct EvalRequest {
  const IdeationTree* tree = nullptr;
  NodeId node;
  std::string code;
  EvalMode mode = EvalMode::kFull;
  // Fraction of the training data to use, in (0, 1].
  double subset_fraction = 1.0;
};

// Evaluates code artifacts. Implementations must be safe to call from
// several threads at once and must report problems through
// EvalOutcome::failure rather than by throwing.
class EvaluationPort {
 public:
  virtual ~EvaluationPort() = default;
  virtual EvalOutcome evaluate(const EvalRequest& request) = 0;
};

// Time source and cost accountant of a run, in minutes.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  // Books the cost of one port call.
  virtual void charge(double cost) = 0;
};

// Time is the sum of charged costs.
class SimulatedClock final : public Clock {
 public:
  double now() const override;
  void charge(double cost) override;
  std::size_t charges() const;

 private:
  mutable std::mutex mu_;
  double total_ = 0.0;
  std::size_t charges_ = 0;
};

// Time is elapsed wall-clock time since construction; charges are ignored.
class WallClock final : public Clock {
 public:
  WallClock();
  double now() const override;
  void charge(double) override {}

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace ideatree

#endif  // IDEATREE_EVALUATION_PORT_HPP_
