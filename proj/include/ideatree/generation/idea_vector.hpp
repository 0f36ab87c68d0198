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

// Text format of synthetic ideas: a label followed by a bracketed list of
// numbers printed with round-trip precision, e.g. "fe [0.25, -0.5]".

#ifndef IDEATREE_GENERATION_IDEA_VECTOR_HPP_
#define IDEATREE_GENERATION_IDEA_VECTOR_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ideatree {

using IdeaVector = std::vector<double>;

std::string format_idea_vector(std::string_view label, std::span<const double> v);

// First bracketed vector in the text. Throws UnparseableIdea.
IdeaVector parse_idea_vector(std::string_view text);

// Every bracketed vector in the text, in order (possibly none).
std::vector<IdeaVector> parse_all_idea_vectors(std::string_view text);

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_IDEA_VECTOR_HPP_
