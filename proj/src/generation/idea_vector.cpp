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

#include "ideatree/generation/idea_vector.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "ideatree/core/error.hpp"

namespace ideatree {

namespace {

std::optional<IdeaVector> parse_body(std::string_view body) {
  IdeaVector v;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t comma = body.find(',', pos);
    std::string item(body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos));
    const auto first = item.find_first_not_of(" \t\n");
    if (first == std::string::npos) return std::nullopt;
    item = item.substr(first, item.find_last_not_of(" \t\n") - first + 1);
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !std::isfinite(x)) return std::nullopt;
    v.push_back(x);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (v.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::string format_idea_vector(std::string_view label, std::span<const double> v) {
  std::string out(label);
  out += " [";
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out += buf;
  }
  out += "]";
  return out;
}

std::vector<IdeaVector> parse_all_idea_vectors(std::string_view text) {
  std::vector<IdeaVector> out;
  std::size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    const std::size_t close = text.find(']', pos);
    if (close == std::string_view::npos) break;
    if (auto v = parse_body(text.substr(pos + 1, close - pos - 1))) out.push_back(std::move(*v));
    pos = close + 1;
  }
  return out;
}

IdeaVector parse_idea_vector(std::string_view text) {
  auto all = parse_all_idea_vectors(text);
  if (all.empty()) {
    throw Error(ErrorCode::kUnparseableIdea,
                "no idea vector in '" + std::string(text.substr(0, 80)) + "'");
  }
  return std::move(all.front());
}

}  // namespace ideatree
