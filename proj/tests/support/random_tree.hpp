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


// Seeded random trees and an independent aggregation oracle for tests.

#ifndef IDEATREE_TESTS_SUPPORT_RANDOM_TREE_HPP_
#define IDEATREE_TESTS_SUPPORT_RANDOM_TREE_HPP_

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ideatree/core/rng.hpp"
#include "ideatree/core/tree.hpp"

namespace ideatree::testing {

// A tree of at most max_nodes nodes with a random mix of FE/MT nodes,
// statuses, scores and provenances.
inline IdeationTree random_tree(std::uint64_t seed, std::size_t max_nodes = 100) {
  Rng rng(seed);
  IdeationTree tree("eda " + std::to_string(seed));
  const std::size_t target = 1 + rng.below(max_nodes);
  std::vector<NodeId> fes;
  std::map<NodeId, std::vector<NodeId>> mts;
  while (tree.size() < target) {
    if (fes.empty() || rng.uniform() < 0.3) {
      Node fe;
      fe.level = NodeLevel::kFe;
      fe.idea_text = "fe " + std::to_string(tree.next_id());
      if (fes.size() >= 2 && rng.uniform() < 0.2) {
        const NodeId a = fes[rng.below(fes.size())];
        const NodeId b = fes[rng.below(fes.size())];
        if (a != b) fe.provenance = Provenance::merged(a, b);
      }
      fe.created_iteration = rng.below(5);
      fes.push_back(tree.add_node(tree.root_id(), fe));
      continue;
    }
    const NodeId parent = fes[rng.below(fes.size())];
    Node mt;
    mt.level = NodeLevel::kMt;
    mt.idea_text = "mt " + std::to_string(tree.next_id());
    if (!mts[parent].empty() && rng.uniform() < 0.15) {
      mt.provenance = Provenance::resampled(mts[parent][rng.below(mts[parent].size())]);
    }
    const double u = rng.uniform();
    if (u < 0.6) {
      mt.status = NodeStatus::kEvaluated;
      mt.raw_score = rng.uniform(-5.0, 5.0) * std::pow(10.0, rng.uniform(-3.0, 3.0));
      mt.code_artifact = "epochs=" + std::to_string(1 + rng.below(100));
    } else if (u < 0.75) {
      mt.status = NodeStatus::kFailed;
    } else if (u < 0.85) {
      mt.status = NodeStatus::kImplemented;
      mt.code_artifact = "lr=0.1";
    }
    if (rng.uniform() < 0.2) mt.predicted_score = rng.uniform(-1.0, 1.0);
    mts[parent].push_back(tree.add_node(parent, mt));
  }
  tree.set_iteration(rng.below(10));
  return tree;
}

// Aggregates recomputed from scratch by scanning the whole node table for
// each interior node, without using the tree's child index.
inline std::map<NodeId, std::optional<double>> oracle_aggregates(const IdeationTree& tree) {
  std::map<NodeId, std::optional<double>> out;
  double root_sum = 0.0;
  std::size_t root_n = 0;
  for (const auto& [id, node] : tree.nodes()) {
    out[id] = std::nullopt;
    if (node.level != NodeLevel::kFe) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [cid, child] : tree.nodes()) {
      if (child.parent == id && child.status == NodeStatus::kEvaluated) {
        sum += *child.raw_score;
        ++n;
      }
    }
    if (n > 0) {
      out[id] = sum / static_cast<double>(n);
      root_sum += *out[id];
      ++root_n;
    }
  }
  if (root_n > 0) out[tree.root_id()] = root_sum / static_cast<double>(root_n);
  return out;
}

}  // namespace ideatree::testing

#endif  // IDEATREE_TESTS_SUPPORT_RANDOM_TREE_HPP_
