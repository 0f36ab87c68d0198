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


// The batch scorer used by full runs: checks each MT idea, optionally prunes
// the batch with the performance predictor, then implements, debugs and
// evaluates the survivors on a worker pool. Workers only read the tree; all
// mutations and log events are committed afterwards in ascending node id, so
// results do not depend on the number of workers.

#ifndef IDEATREE_ORCHESTRATOR_SCORER_HPP_
#define IDEATREE_ORCHESTRATOR_SCORER_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ideatree/evaluation/debug_loop.hpp"
#include "ideatree/generation/checker.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/scoring/predictor.hpp"
#include "ideatree/search/stages.hpp"

namespace ideatree {

struct ScorerOptions {
  std::size_t workers = 1;
  // Fast-mode debugging before the full evaluation; otherwise every debug
  // attempt is a full evaluation.
  bool debug_acceleration = true;
  FastModeTransform fast_mode;
  // Evaluations per debug loop.
  std::size_t max_attempts = 5;
  // Fresh implementations after a recurring error, beyond the first.
  std::size_t max_regenerations = 2;
  // Share of a batch kept for evaluation when prediction is enabled.
  double keep_fraction = 0.5;

  void validate() const;
};

struct ScorerStats {
  std::size_t checked_out = 0;
  std::size_t pruned = 0;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  std::size_t debug_evaluations = 0;
  std::size_t full_evaluations = 0;
  std::size_t regenerations = 0;
};

class PipelineScorer final : public BatchScorer {
 public:
  PipelineScorer(Coder& coder, EvaluationPort& port, Clock& clock, MetricSpec metric,
                 ScorerOptions options, std::vector<NamedCheck> checks = {});

  // Prediction applies to batches of two or more nodes. `anchors` must
  // outlive the scorer or the next disable_prediction().
  void enable_prediction(Predictor& predictor, const AnchorSet& anchors,
                         std::string dataset_description);
  void disable_prediction();
  bool prediction_enabled() const noexcept { return predictor_ != nullptr; }

  void score(TreeEditor& editor, const ContextState& ctx, std::span<const NodeId> mts) override;

  const ErrorLog& errors() const noexcept { return errors_; }
  const ScorerStats& stats() const noexcept { return stats_; }

 private:
  struct Job;
  void run_job(const IdeationTree& tree, const ContextState& ctx, Job& job) const;
  std::vector<NodeId> prune(TreeEditor& editor, std::vector<NodeId> ids);

  Coder& coder_;
  EvaluationPort& port_;
  Clock& clock_;
  MetricSpec metric_;
  ScorerOptions options_;
  std::vector<NamedCheck> checks_;
  Predictor* predictor_ = nullptr;
  const AnchorSet* anchors_ = nullptr;
  std::string dataset_description_;
  ErrorLog errors_;
  ScorerStats stats_;
};

}  // namespace ideatree

#endif  // IDEATREE_ORCHESTRATOR_SCORER_HPP_
