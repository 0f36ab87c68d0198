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


// Fast mode caps time-sensitive parameters of a code artifact so that a
// debug run finishes quickly. Parameters follow a line convention:
//
//   epochs=50
//   n_estimators = 400   # trailing comments are kept
//
// A line whose key has a cap gets min(value, cap). Everything else is left
// byte-for-byte as it was.

#ifndef IDEATREE_EVALUATION_FAST_MODE_HPP_
#define IDEATREE_EVALUATION_FAST_MODE_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ideatree {

// epochs, iteration and boosting-round style keys, all capped at 2.
std::map<std::string, double> default_fast_mode_caps();

struct FastModeTransform {
  std::map<std::string, double> caps = default_fast_mode_caps();
  // Fraction of the training data a debug run uses.
  double subset_fraction = 0.10;
};

class RestoreToken {
 public:
  explicit RestoreToken(std::string original) : original_(std::move(original)) {}
  const std::string& original() const noexcept { return original_; }

 private:
  std::string original_;
};

struct FastModeResult {
  std::string code;
  RestoreToken token;
  double subset_fraction;
  // Keys whose value was lowered, in order of appearance.
  std::vector<std::string> capped;
};

FastModeResult apply_fast_mode(std::string_view code, const FastModeTransform& transform);

// The original artifact, byte for byte.
inline std::string restore(const RestoreToken& token) { return token.original(); }

}  // namespace ideatree

#endif  // IDEATREE_EVALUATION_FAST_MODE_HPP_
