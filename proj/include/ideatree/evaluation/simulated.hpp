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


// A synthetic objective over idea vectors, standing in for training real
// models. An MT node scores
//
//   value = -(|fe - o|^2 + |mt - o|^2) + bonus + noise
//
// where fe and mt are the vectors of the node and its FE parent and o is the
// optimum. Merged FE parents and merged MT nodes add
// merge_bonus / (1 + mean squared distance of their sources to o). The raw
// score is value for higher-is-better metrics and -value otherwise. Noise is
// a deterministic function of (seed, node id, mode).

#ifndef IDEATREE_EVALUATION_SIMULATED_HPP_
#define IDEATREE_EVALUATION_SIMULATED_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ideatree/evaluation/port.hpp"
#include "json.hpp"

namespace ideatree {

struct LandscapeConfig {
  std::size_t dimension = 2;
  // Empty means the origin.
  std::vector<double> optimum;
  double noise_sigma = 0.01;
  double full_cost = 10.0;
  double debug_cost = 1.0;
  double merge_bonus = 0.0;

  // Throws ConfigInvalid.
  void validate() const;
  std::vector<double> optimum_or_origin() const;
};

LandscapeConfig landscape_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LandscapeConfig& c);

class SimulatedEvaluator final : public EvaluationPort {
 public:
  SimulatedEvaluator(LandscapeConfig config, MetricSpec metric, std::uint64_t seed);

  // A code artifact carrying a `bug=` line fails with that error; the cost
  // of the mode is charged either way.
  EvalOutcome evaluate(const EvalRequest& request) override;

  // Noise-free raw score of an MT node. Throws UnparseableIdea.
  double true_score(const IdeationTree& tree, NodeId mt) const;
  // Noise-free raw score of explicit FE and MT vectors without bonus.
  double true_score(std::span<const double> fe, std::span<const double> mt) const;

  const LandscapeConfig& config() const noexcept { return config_; }

 private:
  double value(const IdeationTree& tree, NodeId mt) const;
  double bonus(const IdeationTree& tree, const Node& n) const;
  double sq_dist(std::span<const double> v) const;

  LandscapeConfig config_;
  std::vector<double> optimum_;
  MetricSpec metric_;
  std::uint64_t seed_;
};

}  // namespace ideatree

#endif  // IDEATREE_EVALUATION_SIMULATED_HPP_
