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

#include "ideatree/generation/context.hpp"

#include <algorithm>
#include <stdexcept>

namespace ideatree {

std::string_view to_string(ContextTag tag) {
  switch (tag) {
    case ContextTag::kEda: return "EDA";
    case ContextTag::kReader: return "Reader";
    case ContextTag::kExternal: return "External";
  }
  return "?";
}

ContextTag context_tag_from_string(std::string_view s) {
  if (s == "EDA") return ContextTag::kEda;
  if (s == "Reader") return ContextTag::kReader;
  if (s == "External") return ContextTag::kExternal;
  throw std::invalid_argument("unknown context tag '" + std::string(s) + "'");
}

void ContextState::append(ContextTag tag, std::string text) {
  if (text.empty()) throw std::invalid_argument("context segments must be non-empty");
  segments_.push_back({tag, std::move(text)});
  ++revision_;
}

std::size_t ContextState::count(ContextTag tag) const {
  return static_cast<std::size_t>(std::count_if(
      segments_.begin(), segments_.end(), [tag](const auto& s) { return s.tag == tag; }));
}

bool ContextState::contains(ContextTag tag, std::string_view text) const {
  return std::any_of(segments_.begin(), segments_.end(),
                     [&](const auto& s) { return s.tag == tag && s.text == text; });
}

std::string ContextState::render() const {
  std::string out;
  for (const auto& s : segments_) {
    out += "[";
    out += to_string(s.tag);
    out += "] ";
    out += s.text;
    out += "\n";
  }
  return out;
}

nlohmann::json ContextState::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : segments_) segs.push_back({{"tag", to_string(s.tag)}, {"text", s.text}});
  return {{"revision", revision_}, {"segments", segs}};
}

}  // namespace ideatree
