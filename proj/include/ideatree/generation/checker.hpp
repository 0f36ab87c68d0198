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


#ifndef IDEATREE_GENERATION_CHECKER_HPP_
#define IDEATREE_GENERATION_CHECKER_HPP_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ideatree {

struct CheckResult {
  bool passed = true;
  // One entry per failing check; empty when passed.
  std::vector<std::string> reasons;
};

// A check returns a failure message, or nothing when the candidate passes.
// A check that throws has crashed, which is not the same as failing.
struct NamedCheck {
  std::string name;
  std::function<std::optional<std::string>(std::string_view candidate)> run;
};

// Runs every check. Throws EmptyInput for an empty candidate and
// CheckerCrash if a check throws.
CheckResult check(std::string_view candidate, const std::vector<NamedCheck>& checks);

// The candidate is CSV text whose header row must contain every required
// column.
NamedCheck schema_check(std::vector<std::string> required_columns);

// The candidate must carry a parseable idea vector of the given dimension.
NamedCheck idea_vector_check(std::size_t dimension);

// The candidate must contain something other than whitespace.
NamedCheck nonblank_check();

// Header columns of a CSV text (first line, comma-separated, trimmed).
std::vector<std::string> csv_header(std::string_view csv);

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_CHECKER_HPP_
