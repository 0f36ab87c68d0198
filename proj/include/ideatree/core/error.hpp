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

#ifndef IDEATREE_CORE_ERROR_HPP_
#define IDEATREE_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ideatree {

// Every failure the engine reports carries one of these codes. Callers that
// need to branch on the kind of failure switch on Error::code(); the message
// is for humans.
enum class ErrorCode {
  // core_tree
  kUnknownNode,
  kUnknownParent,
  kLevelMismatch,
  kDuplicateId,
  kMalformedDocument,
  kInvariantViolation,
  // search_ops
  kNonFiniteScore,
  kEmptyInput,
  kNoEvaluatedChildren,
  kInsufficientParents,
  kGeneratorFailure,
  kEvaluationFailure,
  kBudgetExhausted,
  // generation
  kUnknownAnchor,
  kRetrievalFailure,
  kCheckerCrash,
  kInvalidSpaceConfig,
  kTransportFailure,
  kMalformedResponse,
  kRetriesExhausted,
  // evaluation
  kUnparseableIdea,
  kTimeout,
  kNonzeroExit,
  kMissingResultFile,
  kUnparseableResult,
  // scoring_model
  kNoFeNodes,
  kEmptyAnchorSet,
  // orchestrator
  kStageFailure,
  kResplitsExhausted,
  kInitializationFailure,
  kLogVersionMismatch,
  kCorruptLog,
  // cli
  kConfigInvalid,
  kMissingRunArtifacts,
  kMalformedLeaderboardFile,
  kIoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ideatree

#endif  // IDEATREE_CORE_ERROR_HPP_
