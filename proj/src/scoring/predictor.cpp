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


#include "ideatree/scoring/predictor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "ideatree/core/error.hpp"
#include "ideatree/search/selection.hpp"

namespace ideatree {

using nlohmann::json;

json to_json(const AnchorSet& set) {
  json anchors = json::array();
  for (const auto& a : set.anchors) {
    anchors.push_back({{"node", a.node.value},
                       {"fe", a.fe.value},
                       {"architecture", a.architecture},
                       {"true_score", a.true_score}});
  }
  return {{"anchors", anchors},
          {"phase1_fe", set.phase1_fe.assigned() ? json(set.phase1_fe.value) : json()},
          {"phase2_architecture", set.phase2_architecture}};
}

void AnchorConfig::validate() const {
  if (min_anchors == 0 || max_anchors < min_anchors) {
    throw Error(ErrorCode::kConfigInvalid, "anchor bounds need 0 < min <= max");
  }
}

std::string pipeline_description(const IdeationTree& tree, NodeId mt) {
  const Node& n = tree.node(mt);
  if (!n.parent) return n.idea_text;
  return tree.node(*n.parent).idea_text + "\n" + n.idea_text;
}

namespace {

NodeId add_mt(TreeEditor& editor, NodeId fe, const std::string& text) {
  Node n;
  n.level = NodeLevel::kMt;
  n.idea_text = text;
  n.created_iteration = editor.tree().iteration();
  return editor.add_node(fe, std::move(n));
}

// FE nodes by oriented aggregate, best first; unscored last; ties to the
// lower id.
std::vector<NodeId> fe_by_aggregate(const IdeationTree& tree, const MetricSpec& metric) {
  std::vector<NodeId> fes = tree.ids_at(NodeLevel::kFe);
  auto key = [&](NodeId id) {
    const auto& agg = tree.node(id).aggregated_score;
    return agg ? orient(*agg, metric.direction).value : -std::numeric_limits<double>::infinity();
  };
  std::stable_sort(fes.begin(), fes.end(), [&](NodeId a, NodeId b) { return key(a) > key(b); });
  return fes;
}

}  // namespace

AnchorSet build_anchor_set(TreeEditor& editor, BatchScorer& scorer, const ContextState& ctx,
                           std::span<const std::string> architectures, const MetricSpec& metric,
                           const AnchorConfig& config) {
  config.validate();
  const IdeationTree& tree = editor.tree();
  const auto fes = fe_by_aggregate(tree, metric);
  if (fes.empty()) throw Error(ErrorCode::kNoFeNodes, "anchor construction needs an FE node");
  if (architectures.empty()) {
    throw Error(ErrorCode::kEmptyInput, "anchor construction needs architectures");
  }
  AnchorSet set;
  set.phase1_fe = fes.front();

  std::vector<NodeId> phase1;
  const std::size_t n1 = std::min(architectures.size(), config.max_anchors);
  for (std::size_t i = 0; i < n1; ++i) phase1.push_back(add_mt(editor, set.phase1_fe, architectures[i]));
  scorer.score(editor, ctx, phase1);

  std::optional<NodeId> best;
  for (const NodeId id : phase1) {
    const Node& n = tree.node(id);
    if (!n.raw_score) continue;
    if (!best || orient(*n.raw_score, metric.direction).value >
                     orient(*tree.node(*best).raw_score, metric.direction).value) {
      best = id;
    }
  }
  std::vector<NodeId> phase2;
  if (best) {
    set.phase2_architecture = tree.node(*best).idea_text;
    for (std::size_t i = 1; i < fes.size() && phase1.size() + phase2.size() < config.max_anchors;
         ++i) {
      phase2.push_back(add_mt(editor, fes[i], set.phase2_architecture));
    }
    scorer.score(editor, ctx, phase2);
  }
  editor.backpropagate();

  for (const auto& batch : {phase1, phase2}) {
    for (const NodeId id : batch) {
      const Node& n = tree.node(id);
      if (!n.raw_score) continue;
      set.anchors.push_back({id, pipeline_description(tree, id), *n.raw_score, *n.parent,
                             n.idea_text});
    }
  }
  editor.emit(event::kAnchorsBuilt, to_json(set));
  if (set.anchors.size() < config.min_anchors) {
    throw Error(ErrorCode::kEvaluationFailure,
                "only " + std::to_string(set.anchors.size()) + " anchors evaluated, " +
                    std::to_string(config.min_anchors) + " required");
  }
  return set;
}

std::string assemble_prediction_prompt(const std::string& candidate, const AnchorSet& anchors,
                                       const std::string& dataset_description,
                                       const std::string& template_dir) {
  if (anchors.empty()) throw Error(ErrorCode::kEmptyAnchorSet, "no anchors to predict from");
  std::vector<const Anchor*> sorted;
  for (const auto& a : anchors.anchors) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Anchor* a, const Anchor* b) { return a->node < b->node; });
  std::string blocks;
  char score[40];
  for (const Anchor* a : sorted) {
    std::snprintf(score, sizeof score, "%.17g", a->true_score);
    blocks += "[solution " + to_string(a->node) + "]\n" + a->description + "\nscore: " + score +
              "\n\n";
  }
  if (!blocks.empty()) blocks.pop_back();
  return render_template(load_template(template_dir, "predict"),
                         {{"dataset", dataset_description.empty() ? "(none)" : dataset_description},
                          {"anchors", blocks},
                          {"candidate", candidate}});
}

BaselinePredictor::BaselinePredictor(const EmbeddingProvider& embedder, double temperature)
    : embedder_(embedder), temperature_(temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
}

double BaselinePredictor::predict(const std::string& candidate, const AnchorSet& anchors,
                                  const std::string&) {
  if (anchors.empty()) throw Error(ErrorCode::kEmptyAnchorSet, "no anchors to predict from");
  // Sorting by node id keeps the floating-point sum independent of input
  // order.
  std::vector<const Anchor*> sorted;
  for (const auto& a : anchors.anchors) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Anchor* a, const Anchor* b) { return a->node < b->node; });
  const Embedding c = embedder_.embed(candidate);
  std::vector<OrientedScore> sims;
  for (const Anchor* a : sorted) sims.push_back({cosine_similarity(c, embedder_.embed(a->description))});
  const auto w = softmax(sims, temperature_);
  double lo = sorted.front()->true_score, hi = lo, sum = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    sum += w[i] * sorted[i]->true_score;
    lo = std::min(lo, sorted[i]->true_score);
    hi = std::max(hi, sorted[i]->true_score);
  }
  // Rounding can step just outside the hull.
  return std::clamp(sum, lo, hi);
}

std::optional<double> parse_predicted_number(const std::string& reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    const char ch = reply[i];
    const bool starts = std::isdigit(static_cast<unsigned char>(ch)) ||
                        ((ch == '-' || ch == '+' || ch == '.') && i + 1 < reply.size() &&
                         (std::isdigit(static_cast<unsigned char>(reply[i + 1])) ||
                          reply[i + 1] == '.'));
    if (!starts) continue;
    char* end = nullptr;
    const double v = std::strtod(reply.c_str() + i, &end);
    if (end != reply.c_str() + i && std::isfinite(v)) return v;
  }
  return std::nullopt;
}

LlmPredictor::LlmPredictor(ChatEndpointConfig endpoint) : client_(std::move(endpoint)) {}

double LlmPredictor::predict(const std::string& candidate, const AnchorSet& anchors,
                             const std::string& dataset_description) {
  const std::string& dir = client_.config().template_dir;
  const std::vector<ChatMessage> msgs = {
      {"system", load_template(dir, "system")},
      {"user", assemble_prediction_prompt(candidate, anchors, dataset_description, dir)}};
  return client_.complete_parsed<double>(msgs, parse_predicted_number);
}

}  // namespace ideatree
