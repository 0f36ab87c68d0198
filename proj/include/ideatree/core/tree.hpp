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

// The ideation tree: a rooted three-level tree whose root is the single
// exploratory-data-analysis (EDA) node, whose second level holds feature
// engineering (FE) ideas and whose leaves are model training (MT) ideas.
// A root-to-leaf path is one candidate pipeline.
//
// Scores are stored in the task metric's native units. Orientation (making
// "larger is better" hold for every metric) happens at selection time.

#ifndef IDEATREE_CORE_TREE_HPP_
#define IDEATREE_CORE_TREE_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ideatree {

struct NodeId {
  static constexpr std::uint64_t kUnassigned =
      std::numeric_limits<std::uint64_t>::max();

  std::uint64_t value = kUnassigned;

  constexpr bool assigned() const noexcept { return value != kUnassigned; }
  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

constexpr NodeId make_id(std::uint64_t v) { return NodeId{v}; }
std::string to_string(NodeId id);

enum class NodeLevel { kEda, kFe, kMt };
enum class NodeStatus { kProposed, kImplemented, kEvaluated, kFailed };
enum class Direction { kHigherBetter, kLowerBetter };

std::string_view to_string(NodeLevel level);
std::string_view to_string(NodeStatus status);
std::string_view to_string(Direction direction);
NodeLevel level_from_string(std::string_view s);
NodeStatus status_from_string(std::string_view s);
Direction direction_from_string(std::string_view s);

// Fixed for the lifetime of a run.
struct MetricSpec {
  std::string name = "score";
  Direction direction = Direction::kHigherBetter;

  bool operator==(const MetricSpec&) const = default;
};

struct Provenance {
  enum class Kind { kGenerated, kMerged, kResampled };

  Kind kind = Kind::kGenerated;
  // Merged: the two source nodes. Resampled: the node this one copies.
  std::vector<NodeId> sources;

  static Provenance generated() { return {}; }
  static Provenance merged(NodeId a, NodeId b) { return {Kind::kMerged, {a, b}}; }
  static Provenance resampled(NodeId origin) {
    return {Kind::kResampled, {origin}};
  }

  bool operator==(const Provenance&) const = default;
};

struct Node {
  NodeId id;
  NodeLevel level = NodeLevel::kMt;
  std::optional<NodeId> parent;
  std::string idea_text;
  std::optional<std::string> code_artifact;
  // Set iff status == kEvaluated. Only full evaluations land here.
  std::optional<double> raw_score;
  std::optional<double> predicted_score;
  std::optional<double> aggregated_score;
  NodeStatus status = NodeStatus::kProposed;
  Provenance provenance;
  std::uint64_t created_iteration = 0;

  bool operator==(const Node&) const = default;
};

class IdeationTree {
 public:
  explicit IdeationTree(std::string root_text = "exploratory data analysis");
  // Builds a tree around an explicit root node (used by restore and replay).
  explicit IdeationTree(Node root);

  NodeId root_id() const noexcept { return root_; }

  // Attaches `node` under `parent`. An unassigned node.id receives the next
  // monotone id; an explicit id must be unused. Throws UnknownParent,
  // LevelMismatch, DuplicateId or InvariantViolation.
  NodeId add_node(NodeId parent, Node node);

  bool contains(NodeId id) const { return nodes_.contains(id); }
  const Node& node(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::map<NodeId, Node>& nodes() const noexcept { return nodes_; }

  // Ascending id order throughout.
  std::vector<NodeId> children(NodeId id) const;
  std::vector<NodeId> evaluated_children(NodeId id) const;
  std::vector<NodeId> ids_at(NodeLevel level) const;
  std::size_t count_at(NodeLevel level) const;

  std::uint64_t iteration() const noexcept { return iteration_; }
  void set_iteration(std::uint64_t t) noexcept { iteration_ = t; }
  std::uint64_t next_id() const noexcept { return next_id_; }

  void set_code(NodeId id, std::string code);
  // Records a full-evaluation score. Throws NonFiniteScore.
  void set_evaluated(NodeId id, double raw_score);
  void set_failed(NodeId id);
  void set_predicted(NodeId id, double predicted);
  void set_aggregated(NodeId id, std::optional<double> aggregated);

  bool operator==(const IdeationTree& other) const;

 private:
  Node& mutable_node(NodeId id);

  std::map<NodeId, Node> nodes_;
  std::map<NodeId, std::vector<NodeId>> children_;
  NodeId root_;
  std::uint64_t next_id_ = 0;
  std::uint64_t iteration_ = 0;
};

// Recomputes aggregated scores bottom-up: an FE node gets the mean raw score
// of its Evaluated MT children, the root gets the mean of the FE aggregates
// that are set. Everything else is cleared. Raw scores are never touched.
void backpropagate(IdeationTree& tree);

// Throws InvariantViolation if any structural invariant fails.
void check_invariants(const IdeationTree& tree);

inline constexpr int kTreeSchemaVersion = 1;

nlohmann::json node_to_json(const Node& node);
Node node_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IdeationTree& tree);
IdeationTree tree_from_json(const nlohmann::json& doc);

// Self-describing text document ("tree_schema": 1). Deterministic: equal
// trees produce byte-identical documents.
std::string snapshot(const IdeationTree& tree);
// Throws MalformedDocument or InvariantViolation.
IdeationTree restore(std::string_view document);

}  // namespace ideatree

template <>
struct std::hash<ideatree::NodeId> {
  std::size_t operator()(const ideatree::NodeId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

#endif  // IDEATREE_CORE_TREE_HPP_
