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


// Whole-run orchestration: port assembly, tree initialization, the budgeted
// loop alternating the adding and merging stages, run persistence and
// replay.

#ifndef IDEATREE_ORCHESTRATOR_RUN_HPP_
#define IDEATREE_ORCHESTRATOR_RUN_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ideatree/core/run_log.hpp"
#include "ideatree/core/tree.hpp"
#include "ideatree/core/tree_editor.hpp"
#include "ideatree/evaluation/port.hpp"
#include "ideatree/generation/checker.hpp"
#include "ideatree/generation/embedding.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/generation/retrieval.hpp"
#include "ideatree/orchestrator/config.hpp"
#include "ideatree/orchestrator/scorer.hpp"
#include "ideatree/orchestrator/setup.hpp"
#include "ideatree/scoring/predictor.hpp"
#include "ideatree/search/merge_memory.hpp"
#include "json.hpp"

namespace ideatree {

// Everything a run talks to. Members are declared in dependency order, so
// destruction releases users before what they point at.
struct PortBundle {
  std::unique_ptr<EmbeddingProvider> embedder;
  std::unique_ptr<Retriever> retriever;
  std::unique_ptr<IdeaGenerator> generator;
  std::unique_ptr<Coder> coder;
  std::unique_ptr<EvaluationPort> evaluator;
  std::unique_ptr<Predictor> predictor;
  std::vector<NamedCheck> checks;
  std::size_t anchor_architectures = 3;
};

std::unique_ptr<Clock> make_clock(ClockMode mode);

// Synthetic ports: seeded idea space, coder and landscape. LLM ports: chat
// endpoint generator and coder, subprocess evaluator over the dataset
// directory (scratch space under `scratch_dir`). Throws ConfigInvalid.
PortBundle make_ports(const RunConfig& config, const SetupResult& setup,
                      const std::filesystem::path& scratch_dir);

// The setup result used by synthetic runs without a dataset directory.
SetupResult synthetic_setup(const RunConfig& config, RunLog* log = nullptr);

// Records the root, appends number_of_ideas_eda EDA findings, proposes
// number_of_ideas_data FE nodes with number_of_ideas_modelling MT children
// each, scores all MT nodes and backpropagates. Throws GeneratorFailure and
// InitializationFailure (no MT node evaluated).
void initialize_tree(TreeEditor& editor, ContextState& ctx, IdeaGenerator& generator,
                     BatchScorer& scorer, const RunConfig& config);

// Best evaluated MT node by oriented raw score, ties to the lowest id.
std::optional<NodeId> best_node(const IdeationTree& tree, const MetricSpec& metric);

struct RunResult {
  std::optional<NodeId> best;
  std::optional<double> best_score;
  // Completed passes (adding plus merging, or adding alone when merging is
  // disabled) that were not cut short by the budget.
  std::size_t passes = 0;
  double elapsed = 0.0;
};

nlohmann::json to_json(const RunResult& r);

// Called after every stage with the stage name ("initialization", "adding",
// "merging" or "final").
using CheckpointHook = std::function<void(const IdeationTree&, const std::string& stage)>;

struct LoopEnv {
  TreeEditor& editor;
  ContextState& ctx;
  IdeaGenerator& generator;
  BatchScorer& scorer;
  const EmbeddingProvider& embedder;
  MergeMemory& memory;
  Clock& clock;
  MetricSpec metric;
  CheckpointHook checkpoint;
};

// Alternates adding and merging stages until the clock reaches
// time_run_minutes. A stage is started only while budget remains; stage
// errors are logged as StageFailed and the loop moves on. Emits RunFinished.
RunResult run_main_loop(LoopEnv& env, const RunConfig& config, Rng& rng);

// Rebuilds the tree from a run log without calling any port. Throws
// CorruptLog (including a log without RunFinished) and LogVersionMismatch.
IdeationTree replay(const std::vector<nlohmann::json>& records);

struct RunOptions {
  // Dataset directory; synthetic runs without one use an in-memory task.
  std::optional<std::filesystem::path> dataset;
  // Run directory; nothing is written when unset.
  std::optional<std::filesystem::path> out_dir;
};

struct RunOutcome {
  SetupResult setup;
  RunResult result;
  std::vector<nlohmann::json> log;
  std::string final_snapshot;
  ScorerStats scorer_stats;
  nlohmann::json memory;
};

// setup, initialization, anchors, main loop. The run directory holds
// config.json, run.log.jsonl, checkpoints/<n>-<stage>.json,
// checkpoints/final.json, final.json and best_artifact.txt. Throws
// InitializationFailure, ConfigInvalid and setup errors.
RunOutcome execute_run(const RunConfig& config, const RunOptions& options);

}  // namespace ideatree

#endif  // IDEATREE_ORCHESTRATOR_RUN_HPP_
