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

#ifndef IDEATREE_CORE_RUN_LOG_HPP_
#define IDEATREE_CORE_RUN_LOG_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ideatree {

inline constexpr int kLogVersion = 1;

// Event type names as they appear in the "type" field of a log record.
namespace event {
inline constexpr std::string_view kLogHeader = "LogHeader";
inline constexpr std::string_view kRunStarted = "RunStarted";
inline constexpr std::string_view kSetupCompleted = "SetupCompleted";
inline constexpr std::string_view kStageStarted = "StageStarted";
inline constexpr std::string_view kStageSkipped = "SkippedStage";
inline constexpr std::string_view kStageFinished = "StageFinished";
inline constexpr std::string_view kStageFailed = "StageFailed";
inline constexpr std::string_view kContextAppended = "ContextAppended";
inline constexpr std::string_view kExternalQueryFailed = "ExternalQueryFailed";
inline constexpr std::string_view kNodeProposed = "NodeProposed";
inline constexpr std::string_view kNodeImplemented = "NodeImplemented";
inline constexpr std::string_view kNodeEvaluated = "NodeEvaluated";
inline constexpr std::string_view kNodeFailed = "NodeFailed";
inline constexpr std::string_view kPredictionMade = "PredictionMade";
inline constexpr std::string_view kDebugAttempt = "DebugAttempt";
inline constexpr std::string_view kBackpropagated = "Backpropagated";
inline constexpr std::string_view kIterationAdvanced = "IterationAdvanced";
inline constexpr std::string_view kMergeAttempted = "MergeAttempted";
inline constexpr std::string_view kMemoryPromoted = "MemoryPromoted";
inline constexpr std::string_view kAnchorsBuilt = "AnchorsBuilt";
inline constexpr std::string_view kCheckpointWritten = "CheckpointWritten";
inline constexpr std::string_view kRunFinished = "RunFinished";
}  // namespace event

// Append-only, strictly ordered event stream.
//
// Every record carries a sequence number, the clock reading at append time
// and a chained 64-bit digest of the previous record, so truncation and
// in-place edits are detectable on load. Appends are serialized by a mutex;
// the record order is the commit order.
class RunLog {
 public:
  using TimeSource = std::function<double()>;

  RunLog();
  explicit RunLog(TimeSource time_source);
  ~RunLog();

  RunLog(const RunLog&) = delete;
  RunLog& operator=(const RunLog&) = delete;

  // Mirrors every record (including ones already appended) to a JSON-lines
  // file. Records are flushed on flush() and on destruction.
  void attach_file(const std::filesystem::path& path);

  // Appends {"type": type, ...payload}. Returns the sequence number.
  std::uint64_t append(std::string_view type, nlohmann::json payload = nlohmann::json::object());

  void flush();

  std::size_t size() const;
  std::vector<nlohmann::json> records() const;
  // Records whose type equals `type`, in order.
  std::vector<nlohmann::json> records_of(std::string_view type) const;

  void set_time_source(TimeSource time_source);

  // Parses and verifies a JSON-lines log. Throws LogVersionMismatch or
  // CorruptLog (bad JSON, broken sequence, digest mismatch, missing header).
  static std::vector<nlohmann::json> load(const std::filesystem::path& path);
  static std::vector<nlohmann::json> parse(std::string_view text);

 private:
  mutable std::mutex mu_;
  TimeSource time_source_;
  std::vector<nlohmann::json> records_;
  std::uint64_t digest_ = 0;
  std::optional<std::ofstream> file_;
};

// Digest over the canonical dump of a record without its "h" field.
// Sixteen lowercase hex digits.
std::string hex64(std::uint64_t v);

std::uint64_t record_digest(const nlohmann::json& record_without_digest,
                            std::uint64_t previous);

}  // namespace ideatree

#endif  // IDEATREE_CORE_RUN_LOG_HPP_
