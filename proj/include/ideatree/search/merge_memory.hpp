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

#ifndef IDEATREE_SEARCH_MERGE_MEMORY_HPP_
#define IDEATREE_SEARCH_MERGE_MEMORY_HPP_

#include <cstdint>
#include <map>
#include <set>

#include "ideatree/core/tree.hpp"
#include "json.hpp"

namespace ideatree {

// Unordered pair of distinct FE node ids, stored low id first.
class MergePairKey {
 public:
  // Throws std::invalid_argument when a == b.
  MergePairKey(NodeId a, NodeId b);

  NodeId first() const noexcept { return first_; }
  NodeId second() const noexcept { return second_; }

  friend auto operator<=>(const MergePairKey&, const MergePairKey&) = default;

 private:
  NodeId first_;
  NodeId second_;
};

// Short- and long-term memory of FE merge attempts.
//
// A failed merge increments the pair's short-term count; reaching
// theta_fail moves the pair to long-term memory. A successful merge moves
// the pair to long-term memory directly. Pairs in long-term memory are never
// offered for merging again. The two buffers are always disjoint and every
// short-term count lies in [1, theta_fail).
class MergeMemory {
 public:
  explicit MergeMemory(std::uint32_t theta_fail = 2);

  std::uint32_t theta_fail() const noexcept { return theta_fail_; }

  // Returns true when this failure promoted the pair to long-term memory.
  bool record_failure(const MergePairKey& key);
  void record_success(const MergePairKey& key);

  bool is_excluded(const MergePairKey& key) const { return long_term_.contains(key); }
  std::uint32_t failure_count(const MergePairKey& key) const;

  const std::map<MergePairKey, std::uint32_t>& short_term() const noexcept {
    return short_term_;
  }
  const std::set<MergePairKey>& long_term() const noexcept { return long_term_; }

  nlohmann::json to_json() const;
  static MergeMemory from_json(const nlohmann::json& j);

  bool operator==(const MergeMemory&) const = default;

 private:
  std::uint32_t theta_fail_;
  std::map<MergePairKey, std::uint32_t> short_term_;
  std::set<MergePairKey> long_term_;
};

}  // namespace ideatree

#endif  // IDEATREE_SEARCH_MERGE_MEMORY_HPP_
