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


#include "ideatree/search/stages.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ideatree/core/error.hpp"

namespace ideatree {

using nlohmann::json;

std::string_view to_string(ExpansionMode m) {
  return m == ExpansionMode::kFeNodes ? "fe_nodes" : "mt_leaves";
}

ExpansionMode expansion_mode_from_string(std::string_view s) {
  if (s == "fe_nodes") return ExpansionMode::kFeNodes;
  if (s == "mt_leaves") return ExpansionMode::kMtLeaves;
  throw Error(ErrorCode::kConfigInvalid, "unknown expansion mode '" + std::string(s) + "'");
}

void StageParams::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw Error(ErrorCode::kConfigInvalid, std::string(name) + " must be positive");
  };
  positive(n_fe, "n_fe");
  positive(m_mt, "m_mt");
  positive(n_selected, "n_selected");
  positive(max_add_idea, "max_add_idea");
  positive(freshness_iterations, "freshness_iterations");
  positive(resample_per_parent, "resample_per_parent");
  positive(n_selected_merging, "n_selected_merging");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kConfigInvalid, "temperature must be positive");
  }
  if (!(merge_epsilon >= 0.0) || !std::isfinite(merge_epsilon)) {
    throw Error(ErrorCode::kConfigInvalid, "merge_epsilon must be non-negative");
  }
}

void EvaluatingScorer::score(TreeEditor& editor, const ContextState&,
                             std::span<const NodeId> mts) {
  std::vector<NodeId> ids(mts.begin(), mts.end());
  std::sort(ids.begin(), ids.end());
  for (const NodeId id : ids) {
    const Node& n = editor.tree().node(id);
    const EvalOutcome out =
        port_.evaluate({&editor.tree(), id, n.code_artifact.value_or(""), EvalMode::kFull, 1.0});
    if (clock_) clock_->charge(out.cost);
    if (out.ok()) {
      editor.set_evaluated(id, *out.score);
    } else {
      const FailureReport f = out.failure.value_or(FailureReport{});
      editor.set_failed(id, f.error_class + ": " + f.message);
    }
  }
}

std::optional<double> best_child_score(const IdeationTree& tree, NodeId fe,
                                       const MetricSpec& metric) {
  std::optional<double> best;
  for (const NodeId c : tree.evaluated_children(fe)) {
    const double s = orient(*tree.node(c).raw_score, metric.direction).value;
    if (!best || s > *best) best = s;
  }
  return best;
}

std::vector<NodeId> fe_with_evaluated_children(const IdeationTree& tree,
                                               std::size_t min_children) {
  std::vector<NodeId> out;
  for (const NodeId fe : tree.ids_at(NodeLevel::kFe)) {
    if (tree.evaluated_children(fe).size() >= std::max<std::size_t>(min_children, 1)) {
      out.push_back(fe);
    }
  }
  return out;
}

bool is_merge_failure(const IdeationTree& tree, NodeId merged, NodeId parent_a, NodeId parent_b,
                      const MetricSpec& metric, double epsilon) {
  auto best = [&](NodeId fe) {
    const auto s = best_child_score(tree, fe, metric);
    if (!s) throw Error(ErrorCode::kNoEvaluatedChildren, "FE node " + to_string(fe));
    return *s;
  };
  const double m = best(merged);
  return m <= std::max(best(parent_a), best(parent_b)) + epsilon;
}

namespace {

json ids_json(std::span<const NodeId> ids) {
  json a = json::array();
  for (const NodeId id : ids) a.push_back(id.value);
  return a;
}

// Runs a generator call, mapping every failure to GeneratorFailure.
template <typename F>
auto generate(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kGeneratorFailure) throw;
    throw Error(ErrorCode::kGeneratorFailure,
                std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kGeneratorFailure, e.what());
  }
}

void expect_count(const std::vector<std::string>& texts, std::size_t n, const char* what) {
  if (texts.size() != n) {
    throw Error(ErrorCode::kGeneratorFailure, std::string(what) + " returned " +
                                                  std::to_string(texts.size()) + " ideas, " +
                                                  std::to_string(n) + " requested");
  }
}

class StageRunner {
 public:
  StageRunner(StageEnv& env, const StageParams& params, Rng& rng)
      : env_(env), params_(params), rng_(rng) {}

  const IdeationTree& tree() const { return env_.editor.tree(); }

  bool out_of_budget() const { return env_.budget_exhausted && env_.budget_exhausted(); }

  std::optional<double> oriented_aggregate(NodeId id) const {
    const auto& agg = tree().node(id).aggregated_score;
    if (!agg) return std::nullopt;
    return orient(*agg, env_.metric.direction).value;
  }

  // Best node at a level (FE by aggregate, MT by raw score), ties to the
  // lowest id.
  std::optional<NodeId> best_at(NodeLevel level) const {
    std::optional<NodeId> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const NodeId id : tree().ids_at(level)) {
      const Node& n = tree().node(id);
      std::optional<double> s;
      if (level == NodeLevel::kFe) {
        s = oriented_aggregate(id);
      } else if (n.raw_score) {
        s = orient(*n.raw_score, env_.metric.direction).value;
      }
      if (s && (!best || *s > best_score)) {
        best = id;
        best_score = *s;
      }
    }
    return best;
  }

  std::vector<MemoryExcerpt> memory(NodeLevel level, std::optional<NodeId> anchor = {}) {
    if (params_.memory_size == 0) return {};
    if (!anchor) anchor = best_at(level);
    if (!anchor) return {};
    std::vector<NodeId> ids = {*anchor};
    const auto more = select_context_nodes(tree(), *anchor, params_.memory_strategy,
                                           params_.memory_size - 1, env_.embedder, rng_);
    ids.insert(ids.end(), more.begin(), more.end());
    return memory_excerpts(tree(), ids, env_.metric);
  }

  NodeId add(NodeId parent, NodeLevel level, std::string text, Provenance prov = {}) {
    Node n;
    n.level = level;
    n.idea_text = std::move(text);
    n.provenance = std::move(prov);
    n.created_iteration = tree().iteration();
    return env_.editor.add_node(parent, std::move(n));
  }

  std::vector<NodeId> add_mt_children(NodeId fe, std::size_t m,
                                      const std::vector<MemoryExcerpt>& mem) {
    const Node& parent = tree().node(fe);
    auto texts = generate([&] { return env_.generator.propose_mt(parent, env_.ctx, m, mem); });
    expect_count(texts, m, "propose_mt");
    std::vector<NodeId> ids;
    for (auto& t : texts) ids.push_back(add(fe, NodeLevel::kMt, std::move(t)));
    return ids;
  }

  void score(std::span<const NodeId> ids) {
    if (!ids.empty()) env_.scorer.score(env_.editor, env_.ctx, ids);
  }

  // Draws up to k ids from a softmax over the given oriented scores.
  std::vector<NodeId> softmax_pick(const std::vector<NodeId>& ids,
                                   const std::vector<double>& scores, std::size_t k) {
    if (ids.empty() || k == 0) return {};
    std::vector<OrientedScore> s;
    for (double v : scores) s.push_back({v});
    return sample_without_replacement(softmax_select(ids, s, params_.temperature), k, rng_);
  }

  StageEnv& env_;
  const StageParams& params_;
  Rng& rng_;
};

void enrich_context(StageRunner& run) {
  auto& env = run.env_;
  const auto finding = generate([&] { return env.generator.enrich_eda(env.editor.tree(), env.ctx); });
  if (finding && !finding->empty()) {
    env.ctx.append(ContextTag::kEda, *finding);
    env.editor.emit(event::kContextAppended,
                    {{"tag", "EDA"}, {"text", *finding}, {"revision", env.ctx.revision()}});
  }
  gate_external_query(env.ctx, run.params_.external_policy, env.generator,
                      run.params_.external_cap, env.editor.log());
}

std::vector<NodeId> pick_fe_for_expansion(StageRunner& run) {
  const auto& tree = run.tree();
  std::vector<NodeId> fresh, stale;
  std::vector<double> fresh_s, stale_s;
  for (const NodeId id : tree.ids_at(NodeLevel::kFe)) {
    const auto s = run.oriented_aggregate(id);
    if (!s) continue;
    const std::uint64_t created = tree.node(id).created_iteration;
    const std::uint64_t age = tree.iteration() >= created ? tree.iteration() - created : 0;
    if (age < run.params_.freshness_iterations) {
      fresh.push_back(id);
      fresh_s.push_back(*s);
    } else {
      stale.push_back(id);
      stale_s.push_back(*s);
    }
  }
  const std::size_t want = run.params_.n_selected;
  auto picks = run.softmax_pick(fresh, fresh_s, want);
  if (picks.size() < want) {
    const auto more = run.softmax_pick(stale, stale_s, want - picks.size());
    picks.insert(picks.end(), more.begin(), more.end());
  }
  return picks;
}

}  // namespace

AddingReport adding_stage(StageEnv& env, const StageParams& params, Rng& rng) {
  params.validate();
  StageRunner run(env, params, rng);
  AddingReport report;
  const std::uint64_t t = env.editor.tree().iteration();
  env.editor.emit(event::kStageStarted, {{"stage", "adding"}, {"iteration", t}});
  try {
    enrich_context(run);

    // New FE nodes and their MT children.
    const auto fe_memory = run.memory(NodeLevel::kFe);
    auto fe_texts =
        generate([&] { return env.generator.propose_fe(env.ctx, params.n_fe, fe_memory); });
    expect_count(fe_texts, params.n_fe, "propose_fe");
    for (auto& text : fe_texts) {
      report.new_fe.push_back(run.add(env.editor.tree().root_id(), NodeLevel::kFe, std::move(text)));
    }
    for (const NodeId fe : report.new_fe) {
      const auto mem = run.memory(NodeLevel::kMt);
      const auto kids = run.add_mt_children(fe, params.m_mt, mem);
      report.new_mt.insert(report.new_mt.end(), kids.begin(), kids.end());
    }
    run.score(report.new_mt);
    env.editor.backpropagate();

    if (run.out_of_budget()) {
      report.budget_exhausted = true;
    } else {
      // Expansion of the selected set.
      const std::size_t per_node = std::min(params.m_mt, params.max_add_idea);
      std::vector<std::pair<NodeId, std::optional<NodeId>>> targets;  // FE, memory anchor
      if (params.expansion_mode == ExpansionMode::kFeNodes) {
        for (const NodeId fe : pick_fe_for_expansion(run)) targets.emplace_back(fe, std::nullopt);
      } else {
        std::vector<NodeId> leaves;
        std::vector<double> scores;
        for (const NodeId id : env.editor.tree().ids_at(NodeLevel::kMt)) {
          const Node& n = env.editor.tree().node(id);
          if (!n.raw_score) continue;
          leaves.push_back(id);
          scores.push_back(orient(*n.raw_score, env.metric.direction).value);
        }
        for (const NodeId leaf : run.softmax_pick(leaves, scores, params.n_selected)) {
          targets.emplace_back(*env.editor.tree().node(leaf).parent, leaf);
        }
      }
      std::vector<NodeId> added;
      for (const auto& [fe, anchor] : targets) {
        report.expanded.push_back(fe);
        const auto mem = run.memory(NodeLevel::kMt, anchor);
        const auto kids = run.add_mt_children(fe, per_node, mem);
        added.insert(added.end(), kids.begin(), kids.end());
      }
      run.score(added);
      report.new_mt.insert(report.new_mt.end(), added.begin(), added.end());
      env.editor.backpropagate();
    }
  } catch (...) {
    env.editor.backpropagate();
    throw;
  }
  env.editor.emit(event::kStageFinished,
                  {{"stage", "adding"},
                   {"iteration", t},
                   {"new_fe", ids_json(report.new_fe)},
                   {"new_mt", report.new_mt.size()},
                   {"expanded", ids_json(report.expanded)},
                   {"budget_exhausted", report.budget_exhausted}});
  return report;
}

MergeReport merging_stage(StageEnv& env, MergeMemory& memory, const StageParams& params,
                          Rng& rng) {
  params.validate();
  StageRunner run(env, params, rng);
  MergeReport report;
  const auto& tree = env.editor.tree();
  const std::uint64_t t = tree.iteration();
  env.editor.emit(event::kStageStarted, {{"stage", "merging"}, {"iteration", t}});

  const auto eligible = fe_with_evaluated_children(tree, 1);
  if (eligible.size() < 2) {
    report.skipped = true;
    env.editor.emit(event::kStageSkipped,
                    {{"stage", "merging"},
                     {"iteration", t},
                     {"reason", "fewer than two FE nodes with evaluated children"}});
    env.editor.emit(event::kStageFinished,
                    {{"stage", "merging"}, {"iteration", t}, {"skipped", true}});
    return report;
  }

  try {
    // Uniform choice of pairs outside long-term memory.
    std::vector<MergePairKey> pool;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      for (std::size_t j = i + 1; j < eligible.size(); ++j) {
        MergePairKey key(eligible[i], eligible[j]);
        if (!memory.is_excluded(key)) pool.push_back(key);
      }
    }
    std::vector<MergePairKey> pairs;
    while (pairs.size() < params.n_fe && !pool.empty()) {
      const auto k = static_cast<std::ptrdiff_t>(rng.below(pool.size()));
      pairs.push_back(pool[static_cast<std::size_t>(k)]);
      pool.erase(pool.begin() + k);
    }

    // Merged FE nodes with fresh and resampled MT children.
    std::vector<NodeId> batch;
    for (const MergePairKey& key : pairs) {
      const Node& a = tree.node(key.first());
      const Node& b = tree.node(key.second());
      const std::string text = generate([&] { return env.generator.merge_fe(a, b, env.ctx); });
      MergeAttempt attempt{key, NodeId{}, {}, true, std::nullopt, false};
      attempt.merged = run.add(tree.root_id(), NodeLevel::kFe, text,
                               Provenance::merged(key.first(), key.second()));
      const auto mem = run.memory(NodeLevel::kMt);
      attempt.children = run.add_mt_children(attempt.merged, params.m_mt, mem);
      for (const NodeId parent : {key.first(), key.second()}) {
        for (const NodeId origin :
             sample_top(tree, parent, params.resample_per_parent, env.metric, params.temperature,
                        rng, params.sample_top_mode)) {
          attempt.children.push_back(run.add(attempt.merged, NodeLevel::kMt,
                                             tree.node(origin).idea_text,
                                             Provenance::resampled(origin)));
        }
      }
      batch.insert(batch.end(), attempt.children.begin(), attempt.children.end());
      report.attempts.push_back(std::move(attempt));
    }
    run.score(batch);

    // Outcomes and memory transitions, in draw order.
    for (MergeAttempt& attempt : report.attempts) {
      const auto merged_best = best_child_score(tree, attempt.merged, env.metric);
      const double parents_best =
          std::max(*best_child_score(tree, attempt.pair.first(), env.metric),
                   *best_child_score(tree, attempt.pair.second(), env.metric));
      std::string outcome;
      if (!merged_best) {
        attempt.failure = true;
        outcome = "evaluation_failure";
      } else {
        attempt.delta = *merged_best - parents_best;
        attempt.failure = is_merge_failure(tree, attempt.merged, attempt.pair.first(),
                                           attempt.pair.second(), env.metric,
                                           params.merge_epsilon);
        outcome = attempt.failure ? "failure" : "success";
      }
      const json pair = {attempt.pair.first().value, attempt.pair.second().value};
      if (attempt.failure) {
        attempt.promoted = memory.record_failure(attempt.pair);
      } else {
        memory.record_success(attempt.pair);
        attempt.promoted = true;
      }
      env.editor.emit(event::kMergeAttempted,
                      {{"pair", pair},
                       {"merged", attempt.merged.value},
                       {"outcome", outcome},
                       {"delta", attempt.delta ? json(*attempt.delta) : json()},
                       {"failures", memory.failure_count(attempt.pair)}});
      if (attempt.promoted) {
        env.editor.emit(event::kMemoryPromoted,
                        {{"pair", pair}, {"reason", attempt.failure ? "failures" : "success"}});
      }
    }
    env.editor.backpropagate();

    if (run.out_of_budget()) {
      report.budget_exhausted = true;
    } else {
      // MT-level merges inside the best FE nodes.
      std::vector<NodeId> candidates;
      std::vector<double> scores;
      for (const NodeId fe : fe_with_evaluated_children(tree, 2)) {
        if (const auto s = run.oriented_aggregate(fe)) {
          candidates.push_back(fe);
          scores.push_back(*s);
        }
      }
      std::vector<NodeId> added;
      for (const NodeId fe : run.softmax_pick(candidates, scores, params.n_selected_merging)) {
        std::vector<NodeId> kids = tree.evaluated_children(fe);
        std::stable_sort(kids.begin(), kids.end(), [&](NodeId x, NodeId y) {
          return orient(*tree.node(x).raw_score, env.metric.direction).value >
                 orient(*tree.node(y).raw_score, env.metric.direction).value;
        });
        const NodeId a = std::min(kids[0], kids[1]);
        const NodeId b = std::max(kids[0], kids[1]);
        const std::string text = generate(
            [&] { return env.generator.merge_mt(tree.node(a), tree.node(b), env.ctx); });
        added.push_back(run.add(fe, NodeLevel::kMt, text, Provenance::merged(a, b)));
      }
      run.score(added);
      report.merged_mt = added;
      env.editor.backpropagate();
    }
  } catch (...) {
    env.editor.backpropagate();
    throw;
  }
  json merged_fe = json::array();
  for (const auto& a : report.attempts) merged_fe.push_back(a.merged.value);
  env.editor.emit(event::kStageFinished, {{"stage", "merging"},
                                          {"iteration", t},
                                          {"merged_fe", merged_fe},
                                          {"merged_mt", ids_json(report.merged_mt)},
                                          {"budget_exhausted", report.budget_exhausted}});
  return report;
}

}  // namespace ideatree
