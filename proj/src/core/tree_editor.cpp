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

#include "ideatree/core/tree_editor.hpp"

#include <optional>

#include "ideatree/core/error.hpp"

namespace ideatree {

using nlohmann::json;

void TreeEditor::record_root() {
  emit(event::kNodeProposed, {{"node", node_to_json(tree_.node(tree_.root_id()))}});
}

NodeId TreeEditor::add_node(NodeId parent, Node node) {
  const NodeId id = tree_.add_node(parent, std::move(node));
  emit(event::kNodeProposed, {{"node", node_to_json(tree_.node(id))}});
  return id;
}

void TreeEditor::set_code(NodeId id, std::string code) {
  tree_.set_code(id, std::move(code));
  emit(event::kNodeImplemented, {{"id", id.value}, {"code", *tree_.node(id).code_artifact}});
}

void TreeEditor::set_evaluated(NodeId id, double raw_score) {
  tree_.set_evaluated(id, raw_score);
  emit(event::kNodeEvaluated, {{"id", id.value}, {"raw_score", raw_score}});
}

void TreeEditor::set_failed(NodeId id, const std::string& reason) {
  tree_.set_failed(id);
  emit(event::kNodeFailed, {{"id", id.value}, {"reason", reason}});
}

void TreeEditor::set_predicted(NodeId id, double predicted) {
  tree_.set_predicted(id, predicted);
  emit(event::kPredictionMade, {{"id", id.value}, {"predicted_score", predicted}});
}

void TreeEditor::backpropagate() {
  ideatree::backpropagate(tree_);
  emit(event::kBackpropagated);
}

void TreeEditor::set_iteration(std::uint64_t t) {
  tree_.set_iteration(t);
  emit(event::kIterationAdvanced, {{"iteration", t}});
}

IdeationTree apply_journal(const std::vector<json>& records) {
  std::optional<IdeationTree> tree;
  auto require_tree = [&](const json& r) -> IdeationTree& {
    if (!tree) {
      throw Error(ErrorCode::kCorruptLog,
                  "record " + r.at("seq").dump() + " mutates a tree before its root exists");
    }
    return *tree;
  };
  for (const json& r : records) {
    const auto type = r.at("type").get<std::string>();
    try {
      if (type == event::kNodeProposed) {
        Node n = node_from_json(r.at("node"));
        if (!n.parent) {
          if (tree) throw Error(ErrorCode::kCorruptLog, "second root in journal");
          tree.emplace(std::move(n));
        } else {
          const NodeId parent = *n.parent;
          require_tree(r).add_node(parent, std::move(n));
        }
      } else if (type == event::kNodeImplemented) {
        require_tree(r).set_code(make_id(r.at("id").get<std::uint64_t>()),
                                 r.at("code").get<std::string>());
      } else if (type == event::kNodeEvaluated) {
        require_tree(r).set_evaluated(make_id(r.at("id").get<std::uint64_t>()),
                                      r.at("raw_score").get<double>());
      } else if (type == event::kNodeFailed) {
        require_tree(r).set_failed(make_id(r.at("id").get<std::uint64_t>()));
      } else if (type == event::kPredictionMade) {
        require_tree(r).set_predicted(make_id(r.at("id").get<std::uint64_t>()),
                                      r.at("predicted_score").get<double>());
      } else if (type == event::kBackpropagated) {
        backpropagate(require_tree(r));
      } else if (type == event::kIterationAdvanced) {
        require_tree(r).set_iteration(r.at("iteration").get<std::uint64_t>());
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorruptLog, "record " + r.value("seq", json()).dump() + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptLog) throw;
      throw Error(ErrorCode::kCorruptLog,
                  "record " + r.value("seq", json()).dump() + ": " + e.what());
    }
  }
  if (!tree) throw Error(ErrorCode::kCorruptLog, "journal holds no root node");
  return std::move(*tree);
}

}  // namespace ideatree
