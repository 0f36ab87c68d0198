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

#include "ideatree/core/tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "ideatree/core/error.hpp"

namespace ideatree {

namespace {

using nlohmann::json;

std::optional<NodeLevel> child_level(NodeLevel level) {
  switch (level) {
    case NodeLevel::kEda: return NodeLevel::kFe;
    case NodeLevel::kFe: return NodeLevel::kMt;
    case NodeLevel::kMt: return std::nullopt;
  }
  return std::nullopt;
}

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorCode::kInvariantViolation, what);
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("field '") + key + "' must be a number or null");
  }
  return v.get<double>();
}

}  // namespace

std::string to_string(NodeId id) {
  return id.assigned() ? std::to_string(id.value) : std::string("<unassigned>");
}

std::string_view to_string(NodeLevel level) {
  switch (level) {
    case NodeLevel::kEda: return "EDA";
    case NodeLevel::kFe: return "FE";
    case NodeLevel::kMt: return "MT";
  }
  return "?";
}

std::string_view to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::kProposed: return "Proposed";
    case NodeStatus::kImplemented: return "Implemented";
    case NodeStatus::kEvaluated: return "Evaluated";
    case NodeStatus::kFailed: return "Failed";
  }
  return "?";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::kHigherBetter ? "HigherBetter" : "LowerBetter";
}

NodeLevel level_from_string(std::string_view s) {
  if (s == "EDA") return NodeLevel::kEda;
  if (s == "FE") return NodeLevel::kFe;
  if (s == "MT") return NodeLevel::kMt;
  throw Error(ErrorCode::kMalformedDocument,
              "unknown node level '" + std::string(s) + "'");
}

NodeStatus status_from_string(std::string_view s) {
  if (s == "Proposed") return NodeStatus::kProposed;
  if (s == "Implemented") return NodeStatus::kImplemented;
  if (s == "Evaluated") return NodeStatus::kEvaluated;
  if (s == "Failed") return NodeStatus::kFailed;
  throw Error(ErrorCode::kMalformedDocument,
              "unknown node status '" + std::string(s) + "'");
}

Direction direction_from_string(std::string_view s) {
  if (s == "HigherBetter" || s == "higher" || s == "max") {
    return Direction::kHigherBetter;
  }
  if (s == "LowerBetter" || s == "lower" || s == "min") {
    return Direction::kLowerBetter;
  }
  throw Error(ErrorCode::kMalformedDocument,
              "unknown metric direction '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// IdeationTree

IdeationTree::IdeationTree(std::string root_text) {
  Node root;
  root.id = make_id(0);
  root.level = NodeLevel::kEda;
  root.idea_text = std::move(root_text);
  root_ = root.id;
  nodes_.emplace(root.id, std::move(root));
  children_[root_];
  next_id_ = 1;
}

IdeationTree::IdeationTree(Node root) {
  if (root.level != NodeLevel::kEda) violation("root must be an EDA node");
  if (root.parent) violation("root must not have a parent");
  if (!root.id.assigned()) root.id = make_id(0);
  root_ = root.id;
  next_id_ = root.id.value + 1;
  nodes_.emplace(root.id, std::move(root));
  children_[root_];
}

NodeId IdeationTree::add_node(NodeId parent, Node node) {
  const auto parent_it = nodes_.find(parent);
  if (parent_it == nodes_.end()) {
    throw Error(ErrorCode::kUnknownParent, "no node with id " + to_string(parent));
  }
  const auto expected = child_level(parent_it->second.level);
  if (!expected || *expected != node.level) {
    throw Error(ErrorCode::kLevelMismatch,
                std::string(to_string(node.level)) + " node cannot be a child of " +
                    std::string(to_string(parent_it->second.level)) + " node " +
                    to_string(parent));
  }
  if (!node.id.assigned()) {
    node.id = make_id(next_id_);
  } else if (nodes_.contains(node.id)) {
    throw Error(ErrorCode::kDuplicateId, "node id " + to_string(node.id) + " already used");
  }
  if (node.raw_score.has_value() != (node.status == NodeStatus::kEvaluated)) {
    violation("node " + to_string(node.id) + ": raw_score must be set iff status is Evaluated");
  }
  if (node.raw_score && !std::isfinite(*node.raw_score)) {
    throw Error(ErrorCode::kNonFiniteScore, "node " + to_string(node.id));
  }
  const auto& prov = node.provenance;
  switch (prov.kind) {
    case Provenance::Kind::kGenerated:
      if (!prov.sources.empty()) violation("generated node lists sources");
      break;
    case Provenance::Kind::kMerged:
      if (prov.sources.size() != 2 || prov.sources[0] == prov.sources[1]) {
        violation("merged node " + to_string(node.id) + " needs two distinct sources");
      }
      break;
    case Provenance::Kind::kResampled:
      if (prov.sources.size() != 1) {
        violation("resampled node " + to_string(node.id) + " needs one origin");
      }
      break;
  }
  for (const NodeId src : prov.sources) {
    const auto it = nodes_.find(src);
    if (it == nodes_.end() || it->second.level != node.level) {
      violation("provenance source " + to_string(src) + " of node " +
                to_string(node.id) + " is missing or on another level");
    }
  }

  node.parent = parent;
  const NodeId id = node.id;
  next_id_ = std::max(next_id_, id.value + 1);
  nodes_.emplace(id, std::move(node));
  auto& siblings = children_[parent];
  siblings.insert(std::upper_bound(siblings.begin(), siblings.end(), id), id);
  children_[id];
  return id;
}

const Node& IdeationTree::node(NodeId id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::kUnknownNode, "no node with id " + to_string(id));
  }
  return it->second;
}

Node& IdeationTree::mutable_node(NodeId id) {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::kUnknownNode, "no node with id " + to_string(id));
  }
  return it->second;
}

std::vector<NodeId> IdeationTree::children(NodeId id) const {
  const auto it = children_.find(id);
  if (it == children_.end()) {
    throw Error(ErrorCode::kUnknownNode, "no node with id " + to_string(id));
  }
  return it->second;
}

std::vector<NodeId> IdeationTree::evaluated_children(NodeId id) const {
  std::vector<NodeId> out;
  for (const NodeId c : children(id)) {
    if (nodes_.at(c).status == NodeStatus::kEvaluated) out.push_back(c);
  }
  return out;
}

std::vector<NodeId> IdeationTree::ids_at(NodeLevel level) const {
  std::vector<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (n.level == level) out.push_back(id);
  }
  return out;
}

std::size_t IdeationTree::count_at(NodeLevel level) const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [level](const auto& kv) { return kv.second.level == level; }));
}

void IdeationTree::set_code(NodeId id, std::string code) {
  Node& n = mutable_node(id);
  n.code_artifact = std::move(code);
  if (n.status == NodeStatus::kProposed) n.status = NodeStatus::kImplemented;
}

void IdeationTree::set_evaluated(NodeId id, double raw_score) {
  if (!std::isfinite(raw_score)) {
    throw Error(ErrorCode::kNonFiniteScore, "score for node " + to_string(id));
  }
  Node& n = mutable_node(id);
  n.raw_score = raw_score;
  n.status = NodeStatus::kEvaluated;
}

void IdeationTree::set_failed(NodeId id) {
  Node& n = mutable_node(id);
  n.raw_score.reset();
  n.status = NodeStatus::kFailed;
}

void IdeationTree::set_predicted(NodeId id, double predicted) {
  if (!std::isfinite(predicted)) {
    throw Error(ErrorCode::kNonFiniteScore, "prediction for node " + to_string(id));
  }
  mutable_node(id).predicted_score = predicted;
}

void IdeationTree::set_aggregated(NodeId id, std::optional<double> aggregated) {
  mutable_node(id).aggregated_score = aggregated;
}

bool IdeationTree::operator==(const IdeationTree& other) const {
  return root_ == other.root_ && next_id_ == other.next_id_ &&
         iteration_ == other.iteration_ && nodes_ == other.nodes_;
}

// ---------------------------------------------------------------------------

void backpropagate(IdeationTree& tree) {
  double root_sum = 0.0;
  std::size_t root_count = 0;
  for (const NodeId fe : tree.ids_at(NodeLevel::kFe)) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const NodeId mt : tree.evaluated_children(fe)) {
      sum += *tree.node(mt).raw_score;
      ++count;
    }
    if (count == 0) {
      tree.set_aggregated(fe, std::nullopt);
      continue;
    }
    const double mean = sum / static_cast<double>(count);
    tree.set_aggregated(fe, mean);
    root_sum += mean;
    ++root_count;
  }
  for (const NodeId mt : tree.ids_at(NodeLevel::kMt)) {
    tree.set_aggregated(mt, std::nullopt);
  }
  tree.set_aggregated(tree.root_id(),
                      root_count == 0 ? std::nullopt
                                      : std::optional<double>(
                                            root_sum / static_cast<double>(root_count)));
}

void check_invariants(const IdeationTree& tree) {
  std::size_t roots = 0;
  for (const auto& [id, n] : tree.nodes()) {
    if (n.id != id) violation("node stored under a foreign id");
    if (id.value >= tree.next_id()) violation("node id beyond next_id");
    if (!n.parent) {
      ++roots;
      if (n.level != NodeLevel::kEda) violation("non-EDA node without parent");
      continue;
    }
    if (n.level == NodeLevel::kEda) violation("EDA node with a parent");
    const Node& p = tree.node(*n.parent);
    const bool ok = (n.level == NodeLevel::kFe && p.level == NodeLevel::kEda) ||
                    (n.level == NodeLevel::kMt && p.level == NodeLevel::kFe);
    if (!ok) violation("level order broken at node " + to_string(id));
    if (p.id >= n.id) violation("parent id not below child id at node " + to_string(id));
    if (n.raw_score.has_value() != (n.status == NodeStatus::kEvaluated)) {
      violation("raw_score/status mismatch at node " + to_string(id));
    }
  }
  if (roots != 1) violation("tree must have exactly one root");
}

// ---------------------------------------------------------------------------
// Serialization

json node_to_json(const Node& n) {
  json prov = json::object();
  switch (n.provenance.kind) {
    case Provenance::Kind::kGenerated:
      prov["kind"] = "Generated";
      break;
    case Provenance::Kind::kMerged:
      prov["kind"] = "Merged";
      break;
    case Provenance::Kind::kResampled:
      prov["kind"] = "Resampled";
      break;
  }
  json sources = json::array();
  for (const NodeId s : n.provenance.sources) sources.push_back(s.value);
  prov["sources"] = std::move(sources);

  return json{
      {"id", n.id.value},
      {"level", to_string(n.level)},
      {"parent", n.parent ? json(n.parent->value) : json(nullptr)},
      {"idea_text", n.idea_text},
      {"code_artifact", n.code_artifact ? json(*n.code_artifact) : json(nullptr)},
      {"raw_score", optional_number(n.raw_score)},
      {"predicted_score", optional_number(n.predicted_score)},
      {"aggregated_score", optional_number(n.aggregated_score)},
      {"status", to_string(n.status)},
      {"provenance", std::move(prov)},
      {"created_iteration", n.created_iteration},
  };
}

Node node_from_json(const json& j) {
  try {
    Node n;
    n.id = make_id(j.at("id").get<std::uint64_t>());
    n.level = level_from_string(j.at("level").get<std::string>());
    const json& parent = j.at("parent");
    if (parent.is_array()) {
      if (parent.size() > 1) {
        violation("node " + to_string(n.id) + " lists more than one parent");
      }
      if (parent.size() == 1) n.parent = make_id(parent[0].get<std::uint64_t>());
    } else if (!parent.is_null()) {
      n.parent = make_id(parent.get<std::uint64_t>());
    }
    n.idea_text = j.at("idea_text").get<std::string>();
    if (!j.at("code_artifact").is_null()) {
      n.code_artifact = j.at("code_artifact").get<std::string>();
    }
    n.raw_score = read_optional_number(j, "raw_score");
    n.predicted_score = read_optional_number(j, "predicted_score");
    n.aggregated_score = read_optional_number(j, "aggregated_score");
    n.status = status_from_string(j.at("status").get<std::string>());
    const json& prov = j.at("provenance");
    const auto kind = prov.at("kind").get<std::string>();
    if (kind == "Generated") {
      n.provenance.kind = Provenance::Kind::kGenerated;
    } else if (kind == "Merged") {
      n.provenance.kind = Provenance::Kind::kMerged;
    } else if (kind == "Resampled") {
      n.provenance.kind = Provenance::Kind::kResampled;
    } else {
      throw Error(ErrorCode::kMalformedDocument, "unknown provenance '" + kind + "'");
    }
    for (const auto& s : prov.at("sources")) {
      n.provenance.sources.push_back(make_id(s.get<std::uint64_t>()));
    }
    n.created_iteration = j.at("created_iteration").get<std::uint64_t>();
    return n;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
}

json to_json(const IdeationTree& tree) {
  json nodes = json::array();
  for (const auto& [id, n] : tree.nodes()) nodes.push_back(node_to_json(n));
  return json{
      {"tree_schema", kTreeSchemaVersion},
      {"iteration", tree.iteration()},
      {"next_id", tree.next_id()},
      {"root", tree.root_id().value},
      {"nodes", std::move(nodes)},
  };
}

IdeationTree tree_from_json(const json& doc) {
  std::vector<Node> nodes;
  std::uint64_t iteration = 0;
  std::uint64_t next_id = 0;
  try {
    if (!doc.is_object()) {
      throw Error(ErrorCode::kMalformedDocument, "snapshot must be an object");
    }
    if (doc.at("tree_schema").get<int>() != kTreeSchemaVersion) {
      throw Error(ErrorCode::kMalformedDocument, "unsupported tree_schema");
    }
    iteration = doc.at("iteration").get<std::uint64_t>();
    next_id = doc.at("next_id").get<std::uint64_t>();
    for (const auto& j : doc.at("nodes")) nodes.push_back(node_from_json(j));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }

  // A node id appearing twice is a node with two parent edges.
  std::set<NodeId> seen;
  for (const Node& n : nodes) {
    if (!seen.insert(n.id).second) {
      violation("node " + to_string(n.id) + " appears more than once (multiple parents)");
    }
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });

  const auto root_count = std::count_if(nodes.begin(), nodes.end(),
                                        [](const Node& n) { return !n.parent; });
  if (root_count != 1) violation("snapshot must contain exactly one root");
  const auto root_it =
      std::find_if(nodes.begin(), nodes.end(), [](const Node& n) { return !n.parent; });

  IdeationTree tree(*root_it);
  try {
    for (const Node& n : nodes) {
      if (!n.parent) continue;
      if (!tree.contains(*n.parent)) {
        violation("node " + to_string(n.id) + " refers to parent " +
                  to_string(*n.parent) + " that does not precede it");
      }
      tree.add_node(*n.parent, n);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvariantViolation) throw;
    throw Error(ErrorCode::kInvariantViolation, e.what());
  }
  // Ids are never removed, so the counter always sits one past the largest id.
  if (tree.next_id() != next_id) {
    violation("next_id does not match the highest node id");
  }
  tree.set_iteration(iteration);
  check_invariants(tree);
  return tree;
}

std::string snapshot(const IdeationTree& tree) { return to_json(tree).dump(2) + "\n"; }

IdeationTree restore(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
  return tree_from_json(doc);
}

}  // namespace ideatree
