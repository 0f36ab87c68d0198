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

#ifndef IDEATREE_CORE_RNG_HPP_
#define IDEATREE_CORE_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace ideatree {

// Stable 64-bit mixing and string hashing. Used wherever a value must be
// identical across runs, platforms and standard library versions.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

// Seeded random stream.
//
// The std distributions are implementation-defined, so every draw here is
// derived directly from the raw mt19937_64 output. Two Rng objects with the
// same seed yield the same sequence everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();

  // A child stream whose seed is drawn from this one. Forking consumes one
  // draw, so the order of fork() calls is part of the reproducibility
  // contract.
  Rng fork();

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ideatree

#endif  // IDEATREE_CORE_RNG_HPP_
