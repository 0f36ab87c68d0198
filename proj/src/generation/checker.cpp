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


#include "ideatree/generation/checker.hpp"

#include <algorithm>

#include "ideatree/core/error.hpp"
#include "ideatree/generation/idea_vector.hpp"

namespace ideatree {

CheckResult check(std::string_view candidate, const std::vector<NamedCheck>& checks) {
  if (candidate.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to check");
  CheckResult result;
  for (const auto& c : checks) {
    std::optional<std::string> failure;
    try {
      failure = c.run(candidate);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kCheckerCrash, c.name + ": " + e.what());
    } catch (...) {
      throw Error(ErrorCode::kCheckerCrash, c.name);
    }
    if (failure) result.reasons.push_back(c.name + ": " + *failure);
  }
  result.passed = result.reasons.empty();
  return result;
}

std::vector<std::string> csv_header(std::string_view csv) {
  const auto line = csv.substr(0, csv.find('\n'));
  std::vector<std::string> cols;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    auto cell = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    cols.emplace_back(b == std::string_view::npos ? std::string_view{} : cell.substr(b, e - b + 1));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cols;
}

NamedCheck schema_check(std::vector<std::string> required_columns) {
  return {"schema", [cols = std::move(required_columns)](std::string_view candidate)
                        -> std::optional<std::string> {
            const auto header = csv_header(candidate);
            std::string missing;
            for (const auto& c : cols) {
              if (std::find(header.begin(), header.end(), c) == header.end()) {
                missing += missing.empty() ? "" : ", ";
                missing += "'" + c + "'";
              }
            }
            if (missing.empty()) return std::nullopt;
            return "missing required column " + missing;
          }};
}

NamedCheck idea_vector_check(std::size_t dimension) {
  return {"idea_vector", [dimension](std::string_view candidate) -> std::optional<std::string> {
            const auto all = parse_all_idea_vectors(candidate);
            if (all.empty()) return "no idea vector";
            if (all.back().size() != dimension) {
              return "expected dimension " + std::to_string(dimension) + ", got " +
                     std::to_string(all.back().size());
            }
            return std::nullopt;
          }};
}

NamedCheck nonblank_check() {
  return {"nonblank", [](std::string_view candidate) -> std::optional<std::string> {
            if (candidate.find_first_not_of(" \t\r\n") == std::string_view::npos) {
              return "blank text";
            }
            return std::nullopt;
          }};
}

}  // namespace ideatree
