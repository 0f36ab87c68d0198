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


#ifndef IDEATREE_CORE_SIGNATURE_HPP_
#define IDEATREE_CORE_SIGNATURE_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace ideatree {

// Error message with volatile parts removed: runs of digits become '#',
// filesystem paths become "<path>", whitespace runs collapse to one space.
std::string normalize_error_message(std::string_view message);

// Stable hash of (error class, normalized message).
std::uint64_t error_signature(std::string_view error_class, std::string_view message);

}  // namespace ideatree

#endif  // IDEATREE_CORE_SIGNATURE_HPP_
