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


#include "ideatree/evaluation/debug_loop.hpp"

#include <cstdio>
#include <stdexcept>

#include "ideatree/core/signature.hpp"

namespace ideatree {

std::string_view to_string(ErrorRecord::Outcome outcome) {
  switch (outcome) {
    case ErrorRecord::Outcome::kFixed: return "Fixed";
    case ErrorRecord::Outcome::kRegenerated: return "Regenerated";
    case ErrorRecord::Outcome::kAbandoned: return "Abandoned";
  }
  return "?";
}

std::string_view to_string(DebugResult::Outcome outcome) {
  switch (outcome) {
    case DebugResult::Outcome::kDebuggedOk: return "DebuggedOk";
    case DebugResult::Outcome::kRegenerate: return "Regenerate";
    case DebugResult::Outcome::kAbandoned: return "Abandoned";
  }
  return "?";
}

nlohmann::json to_json(const ErrorRecord& r) {
  char sig[17];
  std::snprintf(sig, sizeof sig, "%016llx", static_cast<unsigned long long>(r.signature));
  return {{"signature", sig},        {"error_class", r.error_class}, {"message", r.message},
          {"node", r.node.value},    {"attempts", r.attempts},
          {"outcome", to_string(r.outcome)}};
}

void ErrorLog::append(ErrorRecord record) {
  signatures_.insert(record.signature);
  records_.push_back(std::move(record));
}

std::map<std::uint64_t, std::string> ErrorLog::known_errors() const {
  std::map<std::uint64_t, std::string> out;
  for (const auto& r : records_) out.emplace(r.signature, r.error_class + ": " + r.message);
  return out;
}

namespace {

ErrorRecord make_record(const FailureReport& f, NodeId node, std::size_t attempt,
                        ErrorRecord::Outcome outcome) {
  return {error_signature(f.error_class, f.message), f.error_class, f.message, node, attempt,
          outcome};
}

FailureReport failure_or_unknown(const EvalOutcome& out) {
  if (out.failure) return *out.failure;
  return {ErrorCode::kEvaluationFailure, "EvaluationFailure", "no score and no failure report",
          ""};
}

}  // namespace

DebugResult debug_loop(const IdeationTree& tree, NodeId node, const std::string& code,
                       EvaluationPort& port, const Fixer& fixer,
                       const FastModeTransform& transform, std::size_t max_attempts,
                       ErrorLog& log) {
  if (max_attempts == 0) throw std::invalid_argument("max_attempts must be positive");
  DebugResult result;
  std::string current = code;
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const FastModeResult fast = apply_fast_mode(current, transform);
    const EvalOutcome out =
        port.evaluate({&tree, node, fast.code, EvalMode::kDebug, fast.subset_fraction});
    result.cost += out.cost;
    DebugAttempt a{EvalMode::kDebug, out.ok(), out.failure, fast.capped, out.cost};
    if (out.ok()) {
      result.attempts.push_back(std::move(a));
      result.outcome = DebugResult::Outcome::kDebuggedOk;
      result.code = restore(fast.token);
      return result;
    }
    const FailureReport failure = failure_or_unknown(out);
    a.failure = failure;
    result.attempts.push_back(std::move(a));
    const std::uint64_t sig = error_signature(failure.error_class, failure.message);
    if (log.contains(sig)) {
      log.append(make_record(failure, node, attempt, ErrorRecord::Outcome::kRegenerated));
      result.outcome = DebugResult::Outcome::kRegenerate;
      result.code = current;
      return result;
    }
    if (attempt == max_attempts) {
      log.append(make_record(failure, node, attempt, ErrorRecord::Outcome::kAbandoned));
      break;
    }
    log.append(make_record(failure, node, attempt, ErrorRecord::Outcome::kFixed));
    current = fixer(restore(fast.token), failure);
  }
  result.outcome = DebugResult::Outcome::kAbandoned;
  result.code = current;
  return result;
}

DebugResult unaccelerated_loop(const IdeationTree& tree, NodeId node, const std::string& code,
                               EvaluationPort& port, const Fixer& fixer,
                               std::size_t max_attempts, ErrorLog& log) {
  if (max_attempts == 0) throw std::invalid_argument("max_attempts must be positive");
  DebugResult result;
  std::string current = code;
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const EvalOutcome out = port.evaluate({&tree, node, current, EvalMode::kFull, 1.0});
    result.cost += out.cost;
    DebugAttempt a{EvalMode::kFull, out.ok(), out.failure, {}, out.cost};
    if (out.ok()) {
      result.attempts.push_back(std::move(a));
      result.outcome = DebugResult::Outcome::kDebuggedOk;
      result.code = current;
      result.score = out.score;
      return result;
    }
    const FailureReport failure = failure_or_unknown(out);
    a.failure = failure;
    result.attempts.push_back(std::move(a));
    const bool last = attempt == max_attempts;
    log.append(make_record(failure, node, attempt,
                           last ? ErrorRecord::Outcome::kAbandoned : ErrorRecord::Outcome::kFixed));
    if (!last) current = fixer(current, failure);
  }
  result.outcome = DebugResult::Outcome::kAbandoned;
  result.code = current;
  return result;
}

}  // namespace ideatree
