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

#include "ideatree/search/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ideatree/core/error.hpp"

namespace ideatree {

OrientedScore orient(double raw, Direction direction) noexcept {
  return OrientedScore{direction == Direction::kHigherBetter ? raw : -raw};
}

double unorient(OrientedScore s, Direction direction) noexcept {
  return direction == Direction::kHigherBetter ? s.value : -s.value;
}

std::vector<OrientedScore> orient_scores(std::span<const double> raw,
                                         const MetricSpec& metric) {
  std::vector<OrientedScore> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw Error(ErrorCode::kNonFiniteScore, "score at position " + std::to_string(i));
    }
    out.push_back(orient(raw[i], metric.direction));
  }
  return out;
}

std::vector<double> softmax(std::span<const OrientedScore> scores, double temperature) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "softmax over no scores");
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be > 0");
  const double top = std::max_element(scores.begin(), scores.end())->value;
  std::vector<double> p(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp((scores[i].value - top) / temperature);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

SelectionDistribution softmax_select(std::span<const NodeId> ids,
                                     std::span<const OrientedScore> scores,
                                     double temperature) {
  if (ids.size() != scores.size()) {
    throw std::invalid_argument("softmax_select: ids and scores differ in length");
  }
  return {std::vector<NodeId>(ids.begin(), ids.end()), softmax(scores, temperature)};
}

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::kEmptyInput, "no positive weight to sample from");
  }
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  // Rounding can leave target == total.
  return last_positive;
}

std::vector<NodeId> sample_without_replacement(const SelectionDistribution& dist,
                                               std::size_t k, Rng& rng) {
  std::vector<NodeId> ids = dist.node_ids;
  std::vector<double> w = dist.probabilities;
  std::vector<NodeId> out;
  k = std::min(k, ids.size());
  out.reserve(k);
  while (out.size() < k) {
    // Zero-probability tails (underflow) are still drawable once everything
    // else is gone.
    if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) std::fill(w.begin(), w.end(), 1.0);
    const std::size_t i = sample_index(w, rng);
    out.push_back(ids[i]);
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(i));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

std::vector<NodeId> sample_top(const IdeationTree& tree, NodeId fe, std::size_t k,
                               const MetricSpec& metric, double temperature, Rng& rng,
                               SampleTopMode mode) {
  const std::vector<NodeId> kids = tree.evaluated_children(fe);
  if (kids.empty()) {
    throw Error(ErrorCode::kNoEvaluatedChildren, "FE node " + to_string(fe));
  }
  std::vector<OrientedScore> scores;
  scores.reserve(kids.size());
  for (const NodeId c : kids) {
    scores.push_back(orient(*tree.node(c).raw_score, metric.direction));
  }
  SelectionDistribution dist;
  if (mode == SampleTopMode::kSoftmax) {
    dist = softmax_select(kids, scores, temperature);
  } else {
    dist.node_ids = kids;
    double total = 0.0;
    for (const auto& s : scores) {
      dist.probabilities.push_back(std::max(0.0, s.value));
      total += dist.probabilities.back();
    }
    if (total <= 0.0) {
      std::fill(dist.probabilities.begin(), dist.probabilities.end(), 1.0 / kids.size());
    } else {
      for (double& p : dist.probabilities) p /= total;
    }
  }
  return sample_without_replacement(dist, k, rng);
}

}  // namespace ideatree
