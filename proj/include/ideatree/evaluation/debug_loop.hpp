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


#ifndef IDEATREE_EVALUATION_DEBUG_LOOP_HPP_
#define IDEATREE_EVALUATION_DEBUG_LOOP_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ideatree/evaluation/fast_mode.hpp"
#include "ideatree/evaluation/port.hpp"
#include "json.hpp"

namespace ideatree {

struct ErrorRecord {
  enum class Outcome {
    // The fixer was asked to repair the artifact.
    kFixed,
    // The signature had been seen before; the artifact goes back to the
    // coder instead.
    kRegenerated,
    // The retry budget ran out.
    kAbandoned,
  };

  std::uint64_t signature = 0;
  std::string error_class;
  std::string message;
  NodeId node;
  // 1-based attempt within its debug loop.
  std::size_t attempts = 1;
  Outcome outcome = Outcome::kFixed;
};

std::string_view to_string(ErrorRecord::Outcome outcome);
nlohmann::json to_json(const ErrorRecord& r);

// Every failed debug attempt of a run, in order.
class ErrorLog {
 public:
  void append(ErrorRecord record);
  bool contains(std::uint64_t signature) const { return signatures_.contains(signature); }
  const std::vector<ErrorRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  // Signature -> "Class: message" of the first occurrence.
  std::map<std::uint64_t, std::string> known_errors() const;

 private:
  std::vector<ErrorRecord> records_;
  std::set<std::uint64_t> signatures_;
};

// Repairs an artifact given the failure it produced. Receives and returns
// code in its original (not fast-mode) configuration.
using Fixer = std::function<std::string(const std::string& code, const FailureReport& failure)>;

struct DebugAttempt {
  EvalMode mode = EvalMode::kDebug;
  bool ok = false;
  std::optional<FailureReport> failure;
  std::vector<std::string> capped;
  double cost = 0.0;
};

struct DebugResult {
  enum class Outcome { kDebuggedOk, kRegenerate, kAbandoned };
  Outcome outcome = Outcome::kAbandoned;
  // The artifact in its original configuration (including any fixes).
  std::string code;
  std::vector<DebugAttempt> attempts;
  // Score of the successful attempt for the unaccelerated loop; unset for
  // the fast-mode loop, whose scores are never kept.
  std::optional<double> score;
  double cost = 0.0;
};

std::string_view to_string(DebugResult::Outcome outcome);

// Accelerated debugging: runs the artifact in fast mode (Debug evaluations)
// until it succeeds. An error whose signature is already in the log is not
// debugged again; the loop returns Regenerate without calling the fixer.
// Otherwise the fixer is applied and the artifact retried, for at most
// max_attempts evaluations in total. Every failed attempt is appended to the
// log. On success the returned code is the original configuration, byte for
// byte.
DebugResult debug_loop(const IdeationTree& tree, NodeId node, const std::string& code,
                       EvaluationPort& port, const Fixer& fixer,
                       const FastModeTransform& transform, std::size_t max_attempts,
                       ErrorLog& log);

// Debugging without acceleration: Full evaluations, fixer after every
// failure, no recurring-error shortcut. The successful attempt is the score
// of record.
DebugResult unaccelerated_loop(const IdeationTree& tree, NodeId node, const std::string& code,
                               EvaluationPort& port, const Fixer& fixer,
                               std::size_t max_attempts, ErrorLog& log);

}  // namespace ideatree

#endif  // IDEATREE_EVALUATION_DEBUG_LOOP_HPP_
