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


// The two search operators. Both stages mutate the tree only through a
// TreeEditor, so every change lands in the run log, and both hand freshly
// proposed MT nodes to a BatchScorer, which decides how they get scored
// (full evaluation, debugging, prediction).
//
// Random draws happen on the calling thread in this order:
//
//   adding:  FE memory, then per new FE (ascending id) its MT memory, then
//            the expansion selection, then per selected node its MT memory
//   merging: pair choice, then per pair (in draw order) SampleTop from the
//            first and second parent, then the MT-merge selection

#ifndef IDEATREE_SEARCH_STAGES_HPP_
#define IDEATREE_SEARCH_STAGES_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ideatree/core/rng.hpp"
#include "ideatree/core/tree_editor.hpp"
#include "ideatree/evaluation/port.hpp"
#include "ideatree/generation/context.hpp"
#include "ideatree/generation/embedding.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/search/merge_memory.hpp"
#include "ideatree/search/selection.hpp"

namespace ideatree {

enum class ExpansionMode {
  // Softmax over FE aggregated scores picks the FE nodes that receive more
  // MT children.
  kFeNodes,
  // Softmax over MT oriented scores picks leaves; each picked leaf's FE
  // parent receives more MT children, with the leaf shown as memory.
  kMtLeaves,
};

std::string_view to_string(ExpansionMode m);
ExpansionMode expansion_mode_from_string(std::string_view s);

struct StageParams {
  // N: FE nodes proposed per adding stage and FE pairs merged per merging
  // stage.
  std::size_t n_fe = 2;
  // M: MT children per new FE node, and fresh MT children per merged node.
  std::size_t m_mt = 2;
  // FE nodes picked for expansion after the first backpropagation.
  std::size_t n_selected = 2;
  // Cap on MT children added to each picked node during expansion.
  std::size_t max_add_idea = 2;
  // An FE node created at iteration c counts as fresh while
  // iteration - c < this; expansion picks fresh nodes before stale ones.
  std::size_t freshness_iterations = 2;
  // SampleTop draws per parent of a merged node.
  std::size_t resample_per_parent = 3;
  // FE nodes whose top two MT children get merged.
  std::size_t n_selected_merging = 2;
  double temperature = 1.0;
  double merge_epsilon = 0.0;
  SampleTopMode sample_top_mode = SampleTopMode::kSoftmax;
  ExpansionMode expansion_mode = ExpansionMode::kFeNodes;
  // Tree-memory excerpts shown to the generator.
  std::size_t memory_size = 5;
  ContextStrategy memory_strategy = ContextStrategy::kRandom;
  ExternalPolicy external_policy = ExternalPolicy::kAdaptive;
  // Cap on External segments appended per query.
  std::size_t external_cap = 5;

  // Throws ConfigInvalid.
  void validate() const;
};

// Scores a batch of MT nodes that are still Proposed: each must end up
// Evaluated, Failed, or Proposed with a predicted score, with every change
// made through the editor. Called on the stage's thread.
class BatchScorer {
 public:
  virtual ~BatchScorer() = default;
  virtual void score(TreeEditor& editor, const ContextState& ctx,
                     std::span<const NodeId> mts) = 0;
};

// Full evaluation of each node in id order, no code, no debugging. Charges
// the clock when one is given.
class EvaluatingScorer final : public BatchScorer {
 public:
  explicit EvaluatingScorer(EvaluationPort& port, Clock* clock = nullptr)
      : port_(port), clock_(clock) {}
  void score(TreeEditor& editor, const ContextState& ctx, std::span<const NodeId> mts) override;

 private:
  EvaluationPort& port_;
  Clock* clock_;
};

struct StageEnv {
  TreeEditor& editor;
  ContextState& ctx;
  IdeaGenerator& generator;
  BatchScorer& scorer;
  const EmbeddingProvider& embedder;
  MetricSpec metric;
  // Polled between scoring batches; once true the stage commits what it
  // has, backpropagates and returns early.
  std::function<bool()> budget_exhausted;
};

struct AddingReport {
  std::vector<NodeId> new_fe;
  std::vector<NodeId> new_mt;
  std::vector<NodeId> expanded;
  bool budget_exhausted = false;
};

// One adding stage: EDA enrichment and external knowledge, N new FE nodes
// with M scored MT children each, backpropagation, softmax expansion of
// n_selected nodes by min(M, max_add_idea) scored MT children each, and a
// final backpropagation. Logs StageStarted and StageFinished. Generator
// errors surface as GeneratorFailure after the tree has been
// backpropagated; nodes committed so far stay.
AddingReport adding_stage(StageEnv& env, const StageParams& params, Rng& rng);

struct MergeAttempt {
  MergePairKey pair;
  NodeId merged;
  std::vector<NodeId> children;
  bool failure = true;
  // Oriented best of the merged node minus the better parent's best; unset
  // when no child of the merged node was evaluated.
  std::optional<double> delta;
  bool promoted = false;
};

struct MergeReport {
  bool skipped = false;
  std::vector<MergeAttempt> attempts;
  std::vector<NodeId> merged_mt;
  bool budget_exhausted = false;
};

// One merging stage: up to N FE pairs drawn uniformly from the eligible
// pairs (both FE nodes have an Evaluated MT child, pair not in long-term
// memory), each merged into a new FE node that receives M fresh MT children
// plus SampleTop copies from both parents; the merge outcome updates the
// memory. Then n_selected_merging FE nodes with two or more Evaluated
// children get an MT child merged from their two best children. Skipped
// (logged as SkippedStage) when fewer than two FE nodes are eligible.
MergeReport merging_stage(StageEnv& env, MergeMemory& memory, const StageParams& params,
                          Rng& rng);

// True iff the merged node's best oriented MT score does not beat both
// parents' bests by more than epsilon. Throws NoEvaluatedChildren.
bool is_merge_failure(const IdeationTree& tree, NodeId merged, NodeId parent_a,
                      NodeId parent_b, const MetricSpec& metric, double epsilon);

// Best oriented raw score among the Evaluated MT children of an FE node.
std::optional<double> best_child_score(const IdeationTree& tree, NodeId fe,
                                       const MetricSpec& metric);

// FE nodes with at least `min_children` Evaluated MT children.
std::vector<NodeId> fe_with_evaluated_children(const IdeationTree& tree,
                                               std::size_t min_children);

}  // namespace ideatree

#endif  // IDEATREE_SEARCH_STAGES_HPP_
