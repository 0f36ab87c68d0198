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

#include "ideatree/core/error.hpp"

namespace ideatree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kUnknownParent: return "UnknownParent";
    case ErrorCode::kLevelMismatch: return "LevelMismatch";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kNonFiniteScore: return "NonFiniteScore";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNoEvaluatedChildren: return "NoEvaluatedChildren";
    case ErrorCode::kInsufficientParents: return "InsufficientParents";
    case ErrorCode::kGeneratorFailure: return "GeneratorFailure";
    case ErrorCode::kEvaluationFailure: return "EvaluationFailure";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kUnknownAnchor: return "UnknownAnchor";
    case ErrorCode::kRetrievalFailure: return "RetrievalFailure";
    case ErrorCode::kCheckerCrash: return "CheckerCrash";
    case ErrorCode::kInvalidSpaceConfig: return "InvalidSpaceConfig";
    case ErrorCode::kTransportFailure: return "TransportFailure";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kUnparseableIdea: return "UnparseableIdea";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kNonzeroExit: return "NonzeroExit";
    case ErrorCode::kMissingResultFile: return "MissingResultFile";
    case ErrorCode::kUnparseableResult: return "UnparseableResult";
    case ErrorCode::kNoFeNodes: return "NoFeNodes";
    case ErrorCode::kEmptyAnchorSet: return "EmptyAnchorSet";
    case ErrorCode::kStageFailure: return "StageFailure";
    case ErrorCode::kResplitsExhausted: return "ResplitsExhausted";
    case ErrorCode::kInitializationFailure: return "InitializationFailure";
    case ErrorCode::kLogVersionMismatch: return "LogVersionMismatch";
    case ErrorCode::kCorruptLog: return "CorruptLog";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kMissingRunArtifacts: return "MissingRunArtifacts";
    case ErrorCode::kMalformedLeaderboardFile: return "MalformedLeaderboardFile";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace ideatree
