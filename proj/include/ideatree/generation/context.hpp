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

#ifndef IDEATREE_GENERATION_CONTEXT_HPP_
#define IDEATREE_GENERATION_CONTEXT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ideatree {

enum class ContextTag { kEda, kReader, kExternal };

std::string_view to_string(ContextTag tag);
ContextTag context_tag_from_string(std::string_view s);

struct ContextSegment {
  ContextTag tag;
  std::string text;

  bool operator==(const ContextSegment&) const = default;
};

// The global generation context: EDA findings, task-reader output and
// retrieved external knowledge, kept as an ordered list of tagged text
// segments. Append-only: existing segments are never edited or reordered,
// and every append bumps the revision.
class ContextState {
 public:
  // Throws std::invalid_argument for empty text.
  void append(ContextTag tag, std::string text);

  const std::vector<ContextSegment>& segments() const noexcept { return segments_; }
  std::uint64_t revision() const noexcept { return revision_; }
  std::size_t count(ContextTag tag) const;
  bool contains(ContextTag tag, std::string_view text) const;

  // All segments rendered as "[TAG] text" lines, in order.
  std::string render() const;

  nlohmann::json to_json() const;

 private:
  std::vector<ContextSegment> segments_;
  std::uint64_t revision_ = 0;
};

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_CONTEXT_HPP_
