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

#include "ideatree/core/run_log.hpp"

#include <sstream>

#include "ideatree/core/error.hpp"
#include "ideatree/core/rng.hpp"

namespace ideatree {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::uint64_t record_digest(const json& record_without_digest, std::uint64_t previous) {
  return fnv1a64(record_without_digest.dump(), splitmix64(previous));
}

RunLog::RunLog() : RunLog([] { return 0.0; }) {}

RunLog::RunLog(TimeSource time_source) : time_source_(std::move(time_source)) {
  append(event::kLogHeader, {{"log_version", kLogVersion}, {"engine", "ideatree"}});
}

RunLog::~RunLog() {
  try {
    flush();
  } catch (...) {
  }
}

void RunLog::attach_file(const std::filesystem::path& path) {
  std::lock_guard lock(mu_);
  file_.emplace(path, std::ios::out | std::ios::trunc);
  if (!*file_) throw Error(ErrorCode::kIoError, "cannot open log file " + path.string());
  for (const auto& r : records_) *file_ << r.dump() << '\n';
}

std::uint64_t RunLog::append(std::string_view type, json payload) {
  std::lock_guard lock(mu_);
  json record = payload.is_object() ? std::move(payload) : json::object();
  const std::uint64_t seq = records_.size();
  record["type"] = type;
  record["seq"] = seq;
  record["t"] = time_source_();
  digest_ = record_digest(record, digest_);
  record["h"] = hex64(digest_);
  if (file_) *file_ << record.dump() << '\n';
  records_.push_back(std::move(record));
  return seq;
}

void RunLog::flush() {
  std::lock_guard lock(mu_);
  if (file_) file_->flush();
}

std::size_t RunLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<json> RunLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<json> RunLog::records_of(std::string_view type) const {
  std::lock_guard lock(mu_);
  std::vector<json> out;
  for (const auto& r : records_) {
    if (r.at("type").get<std::string_view>() == type) out.push_back(r);
  }
  return out;
}

void RunLog::set_time_source(TimeSource time_source) {
  std::lock_guard lock(mu_);
  time_source_ = std::move(time_source);
}

std::vector<json> RunLog::parse(std::string_view text) {
  std::vector<json> out;
  std::uint64_t digest = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json r;
    try {
      r = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorruptLog, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!r.is_object() || !r.contains("h") || !r.contains("seq") || !r.contains("type")) {
      throw Error(ErrorCode::kCorruptLog, "line " + std::to_string(line_no) + ": not a record");
    }
    if (!r["seq"].is_number_unsigned() || r["seq"].get<std::uint64_t>() != out.size()) {
      throw Error(ErrorCode::kCorruptLog,
                  "line " + std::to_string(line_no) + ": sequence number out of order");
    }
    const std::string h = r["h"].is_string() ? r["h"].get<std::string>() : std::string();
    json body = r;
    body.erase("h");
    digest = record_digest(body, digest);
    if (h != hex64(digest)) {
      throw Error(ErrorCode::kCorruptLog,
                  "line " + std::to_string(line_no) + ": digest mismatch (edited record?)");
    }
    if (out.empty()) {
      if (r["type"] != event::kLogHeader) {
        throw Error(ErrorCode::kCorruptLog, "log does not start with a header");
      }
      if (r.value("log_version", -1) != kLogVersion) {
        throw Error(ErrorCode::kLogVersionMismatch,
                    "log version " + r.value("log_version", json(nullptr)).dump() +
                        ", engine expects " + std::to_string(kLogVersion));
      }
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(ErrorCode::kCorruptLog, "empty log");
  return out;
}

std::vector<json> RunLog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingRunArtifacts, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace ideatree
