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


#include "ideatree/evaluation/port.hpp"

#include <cmath>
#include <stdexcept>

namespace ideatree {

std::string_view to_string(EvalMode mode) {
  return mode == EvalMode::kFull ? "Full" : "Debug";
}

double SimulatedClock::now() const {
  std::lock_guard lock(mu_);
  return total_;
}

void SimulatedClock::charge(double cost) {
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw std::invalid_argument("cost must be finite and non-negative");
  }
  std::lock_guard lock(mu_);
  total_ += cost;
  ++charges_;
}

std::size_t SimulatedClock::charges() const {
  std::lock_guard lock(mu_);
  return charges_;
}

WallClock::WallClock() : start_(std::chrono::steady_clock::now()) {}

double WallClock::now() const {
  return std::chrono::duration<double, std::ratio<60>>(std::chrono::steady_clock::now() - start_)
      .count();
}

}  // namespace ideatree
