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

#ifndef IDEATREE_SEARCH_SELECTION_HPP_
#define IDEATREE_SEARCH_SELECTION_HPP_

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "ideatree/core/rng.hpp"
#include "ideatree/core/tree.hpp"

namespace ideatree {

// A metric value with its sign fixed so that larger is always better.
struct OrientedScore {
  double value = 0.0;

  friend auto operator<=>(const OrientedScore&, const OrientedScore&) = default;
};

OrientedScore orient(double raw, Direction direction) noexcept;
double unorient(OrientedScore s, Direction direction) noexcept;

// Throws NonFiniteScore.
std::vector<OrientedScore> orient_scores(std::span<const double> raw,
                                         const MetricSpec& metric);

// exp(s_i / t) / sum_k exp(s_k / t), evaluated after subtracting the maximum.
// Throws EmptyInput on an empty list.
std::vector<double> softmax(std::span<const OrientedScore> scores, double temperature);

struct SelectionDistribution {
  std::vector<NodeId> node_ids;
  std::vector<double> probabilities;
};

SelectionDistribution softmax_select(std::span<const NodeId> ids,
                                     std::span<const OrientedScore> scores,
                                     double temperature);

// Index drawn from a categorical distribution (weights need not be
// normalized, but must be non-negative with a positive sum).
std::size_t sample_index(std::span<const double> weights, Rng& rng);

// Successive sampling: draw, remove, renormalize. Returns min(k, n) distinct
// ids in draw order.
std::vector<NodeId> sample_without_replacement(const SelectionDistribution& dist,
                                               std::size_t k, Rng& rng);

enum class SampleTopMode {
  kSoftmax,
  // Literal proportionality to oriented scores. Only meaningful for metrics
  // whose oriented values are non-negative; negative weights are clamped to 0
  // and an all-zero vector falls back to uniform.
  kProportional,
};

// Draws up to k Evaluated MT children of `fe` with probability increasing in
// their oriented raw score. Throws NoEvaluatedChildren.
std::vector<NodeId> sample_top(const IdeationTree& tree, NodeId fe, std::size_t k,
                               const MetricSpec& metric, double temperature, Rng& rng,
                               SampleTopMode mode = SampleTopMode::kSoftmax);

}  // namespace ideatree

#endif  // IDEATREE_SEARCH_SELECTION_HPP_
