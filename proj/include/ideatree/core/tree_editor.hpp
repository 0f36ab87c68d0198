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

#ifndef IDEATREE_CORE_TREE_EDITOR_HPP_
#define IDEATREE_CORE_TREE_EDITOR_HPP_

#include <string>
#include <vector>

#include "ideatree/core/run_log.hpp"
#include "ideatree/core/tree.hpp"

namespace ideatree {

// The single writer of a tree during a run. Every mutation is applied to the
// tree and journaled to the run log (when one is attached), which is what
// makes replay possible without re-invoking generators or evaluators.
class TreeEditor {
 public:
  explicit TreeEditor(IdeationTree& tree, RunLog* log = nullptr) : tree_(tree), log_(log) {}

  const IdeationTree& tree() const noexcept { return tree_; }
  RunLog* log() const noexcept { return log_; }

  // Journals the root node. Call once, before any other mutation.
  void record_root();
  NodeId add_node(NodeId parent, Node node);
  void set_code(NodeId id, std::string code);
  void set_evaluated(NodeId id, double raw_score);
  void set_failed(NodeId id, const std::string& reason);
  void set_predicted(NodeId id, double predicted);
  void backpropagate();
  void set_iteration(std::uint64_t t);

  void emit(std::string_view type, nlohmann::json payload = nlohmann::json::object()) const {
    if (log_) log_->append(type, std::move(payload));
  }

 private:
  IdeationTree& tree_;
  RunLog* log_;
};

// Rebuilds a tree from the journal records of a log. Only tree-mutating
// events are interpreted; everything else is skipped. Throws CorruptLog when
// a record cannot be applied.
IdeationTree apply_journal(const std::vector<nlohmann::json>& records);

}  // namespace ideatree

#endif  // IDEATREE_CORE_TREE_EDITOR_HPP_
