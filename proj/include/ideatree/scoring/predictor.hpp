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


// Predictive scoring of MT candidates from anchor examples: a handful of
// fully evaluated pipelines whose descriptions and scores stand as evidence
// for the score of a new candidate.

#ifndef IDEATREE_SCORING_PREDICTOR_HPP_
#define IDEATREE_SCORING_PREDICTOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ideatree/core/tree_editor.hpp"
#include "ideatree/generation/chat_client.hpp"
#include "ideatree/generation/context.hpp"
#include "ideatree/generation/embedding.hpp"
#include "ideatree/search/stages.hpp"
#include "json.hpp"

namespace ideatree {

struct Anchor {
  // The Evaluated MT node the anchor was read from.
  NodeId node;
  std::string description;
  // Raw score of that node's full evaluation.
  double true_score = 0.0;
  NodeId fe;
  // The MT idea text: the architecture tried.
  std::string architecture;
};

struct AnchorSet {
  std::vector<Anchor> anchors;
  // FE node every architecture was tried on.
  NodeId phase1_fe;
  // Architecture then tried on the other FE nodes.
  std::string phase2_architecture;

  bool empty() const noexcept { return anchors.empty(); }
};

nlohmann::json to_json(const AnchorSet& set);

struct AnchorConfig {
  std::size_t min_anchors = 2;
  std::size_t max_anchors = 5;

  // Throws ConfigInvalid.
  void validate() const;
};

// "<FE idea>\n<MT idea>": the text a predictor sees for an MT node.
std::string pipeline_description(const IdeationTree& tree, NodeId mt);

// Two-phase anchor construction. Phase 1 adds one MT node per architecture
// under the FE node with the best aggregated score (ties to the lowest id).
// Phase 2 takes the architecture with the best phase-1 score and adds it
// under each other FE node, best aggregate first. The scorer must evaluate
// in full. At most max_anchors nodes are added in total; anchors that fail
// are left out. Logs AnchorsBuilt. Throws NoFeNodes, EmptyInput (no
// architectures) and EvaluationFailure (fewer than min_anchors evaluated).
AnchorSet build_anchor_set(TreeEditor& editor, BatchScorer& scorer, const ContextState& ctx,
                           std::span<const std::string> architectures, const MetricSpec& metric,
                           const AnchorConfig& config);

// The predict template filled with the dataset description, the anchors
// (sorted by node id, one block each) and the candidate. Throws
// EmptyAnchorSet.
std::string assemble_prediction_prompt(const std::string& candidate, const AnchorSet& anchors,
                                       const std::string& dataset_description,
                                       const std::string& template_dir = "");

// Estimates the raw score of a candidate pipeline. Implementations must be
// safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(const std::string& candidate, const AnchorSet& anchors,
                         const std::string& dataset_description) = 0;
};

// Weighted mean of anchor scores with weights softmax(cos(candidate,
// anchor) / temperature) over description embeddings. Always within the
// range of the anchor scores. Throws EmptyAnchorSet.
class BaselinePredictor final : public Predictor {
 public:
  explicit BaselinePredictor(const EmbeddingProvider& embedder, double temperature = 0.05);
  double predict(const std::string& candidate, const AnchorSet& anchors,
                 const std::string& dataset_description) override;

 private:
  const EmbeddingProvider& embedder_;
  double temperature_;
};

// Asks a chat-completion endpoint, with the prompt above, for a single
// number.
class LlmPredictor final : public Predictor {
 public:
  explicit LlmPredictor(ChatEndpointConfig endpoint);
  double predict(const std::string& candidate, const AnchorSet& anchors,
                 const std::string& dataset_description) override;

 private:
  ChatClient client_;
};

// First finite number in a reply, if any.
std::optional<double> parse_predicted_number(const std::string& reply);

}  // namespace ideatree

#endif  // IDEATREE_SCORING_PREDICTOR_HPP_
