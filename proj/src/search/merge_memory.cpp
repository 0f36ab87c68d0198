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

#include "ideatree/search/merge_memory.hpp"

#include <stdexcept>

#include "ideatree/core/error.hpp"

namespace ideatree {

MergePairKey::MergePairKey(NodeId a, NodeId b)
    : first_(a < b ? a : b), second_(a < b ? b : a) {
  if (a == b) throw std::invalid_argument("merge pair needs two distinct nodes");
}

MergeMemory::MergeMemory(std::uint32_t theta_fail) : theta_fail_(theta_fail) {
  if (theta_fail == 0) throw std::invalid_argument("theta_fail must be positive");
}

bool MergeMemory::record_failure(const MergePairKey& key) {
  if (long_term_.contains(key)) return false;
  const std::uint32_t count = ++short_term_[key];
  if (count >= theta_fail_) {
    short_term_.erase(key);
    long_term_.insert(key);
    return true;
  }
  return false;
}

void MergeMemory::record_success(const MergePairKey& key) {
  short_term_.erase(key);
  long_term_.insert(key);
}

std::uint32_t MergeMemory::failure_count(const MergePairKey& key) const {
  const auto it = short_term_.find(key);
  return it == short_term_.end() ? 0 : it->second;
}

nlohmann::json MergeMemory::to_json() const {
  nlohmann::json shorts = nlohmann::json::array();
  for (const auto& [k, c] : short_term_) {
    shorts.push_back({{"pair", {k.first().value, k.second().value}}, {"failures", c}});
  }
  nlohmann::json longs = nlohmann::json::array();
  for (const auto& k : long_term_) longs.push_back({k.first().value, k.second().value});
  return {{"theta_fail", theta_fail_}, {"short_term", shorts}, {"long_term", longs}};
}

MergeMemory MergeMemory::from_json(const nlohmann::json& j) {
  try {
    MergeMemory m(j.at("theta_fail").get<std::uint32_t>());
    for (const auto& e : j.at("short_term")) {
      const auto& p = e.at("pair");
      const auto c = e.at("failures").get<std::uint32_t>();
      if (c == 0 || c >= m.theta_fail_) {
        throw Error(ErrorCode::kInvariantViolation, "short-term count out of range");
      }
      m.short_term_[MergePairKey(make_id(p.at(0).get<std::uint64_t>()),
                                 make_id(p.at(1).get<std::uint64_t>()))] = c;
    }
    for (const auto& p : j.at("long_term")) {
      const MergePairKey k(make_id(p.at(0).get<std::uint64_t>()),
                           make_id(p.at(1).get<std::uint64_t>()));
      if (m.short_term_.contains(k)) {
        throw Error(ErrorCode::kInvariantViolation, "pair in both memories");
      }
      m.long_term_.insert(k);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
}

}  // namespace ideatree
