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


#include <gtest/gtest.h>

#include <set>

#include "ideatree/core/error.hpp"
#include "ideatree/evaluation/simulated.hpp"
#include "ideatree/generation/synthetic.hpp"
#include "ideatree/search/stages.hpp"

namespace ideatree {
namespace {

// A small world of synthetic ports around one tree.
struct World {
  explicit World(std::uint64_t seed, MetricSpec m = {}, LandscapeConfig landscape = {})
      : metric(m),
        generator(SpaceConfig{}, seed),
        evaluator(landscape, metric, seed),
        scorer(evaluator, &clock),
        editor(tree, &log),
        env{editor, ctx, generator, scorer, embedder, metric, {}} {
    editor.record_root();
  }

  // Two FE nodes with two evaluated MT children each.
  void seed_tree(std::size_t fe = 2, std::size_t mt = 2) {
    const auto texts = generator.propose_fe(ctx, fe, {});
    std::vector<NodeId> kids;
    for (const auto& t : texts) {
      Node n;
      n.level = NodeLevel::kFe;
      n.idea_text = t;
      const NodeId id = editor.add_node(tree.root_id(), n);
      for (const auto& mt_text : generator.propose_mt(tree.node(id), ctx, mt, {})) {
        Node c;
        c.level = NodeLevel::kMt;
        c.idea_text = mt_text;
        kids.push_back(editor.add_node(id, c));
      }
    }
    scorer.score(editor, ctx, kids);
    editor.backpropagate();
  }

  MetricSpec metric;
  IdeationTree tree;
  ContextState ctx;
  RunLog log;
  SimulatedClock clock;
  SyntheticGenerator generator;
  SimulatedEvaluator evaluator;
  EvaluatingScorer scorer;
  IdeaVectorEmbedder embedder;
  TreeEditor editor;
  StageEnv env;
};

TEST(StageParamsTest, DefaultsAndValidation) {
  StageParams p;
  EXPECT_EQ(p.n_fe, 2u);
  EXPECT_EQ(p.m_mt, 2u);
  EXPECT_EQ(p.n_selected, 2u);
  EXPECT_EQ(p.max_add_idea, 2u);
  EXPECT_EQ(p.resample_per_parent, 3u);
  EXPECT_DOUBLE_EQ(p.temperature, 1.0);
  EXPECT_DOUBLE_EQ(p.merge_epsilon, 0.0);
  p.n_fe = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.temperature = 0;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_EQ(expansion_mode_from_string("mt_leaves"), ExpansionMode::kMtLeaves);
  EXPECT_THROW(expansion_mode_from_string("x"), Error);
}

TEST(AddingStageTest, CountsFollowParameters) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t m = 1; m <= 3; ++m) {
      for (std::size_t sel = 1; sel <= 3; ++sel) {
        World w(17 * n + 5 * m + sel);
        w.seed_tree();
        StageParams p;
        p.n_fe = n;
        p.m_mt = m;
        p.n_selected = sel;
        Rng rng(1);
        const std::size_t fe0 = w.tree.count_at(NodeLevel::kFe);
        const std::size_t mt0 = w.tree.count_at(NodeLevel::kMt);
        const auto report = adding_stage(w.env, p, rng);
        EXPECT_EQ(w.tree.count_at(NodeLevel::kFe), fe0 + n);
        EXPECT_EQ(w.tree.count_at(NodeLevel::kMt), mt0 + n * m + sel * std::min(m, p.max_add_idea));
        EXPECT_EQ(report.expanded.size(), sel);
        EXPECT_EQ(std::set<NodeId>(report.expanded.begin(), report.expanded.end()).size(), sel);
        check_invariants(w.tree);
      }
    }
  }
}

TEST(AddingStageTest, PrefersFreshNodes) {
  World w(3);
  w.seed_tree(3, 2);  // created at iteration 0
  w.editor.set_iteration(5);
  StageParams p;
  p.n_fe = 2;
  p.n_selected = 2;
  Rng rng(9);
  const auto report = adding_stage(w.env, p, rng);
  // Only the two new nodes are fresh, and both get picked.
  EXPECT_EQ(std::set<NodeId>(report.expanded.begin(), report.expanded.end()),
            std::set<NodeId>(report.new_fe.begin(), report.new_fe.end()));
  p.n_selected = 4;
  const auto more = adding_stage(w.env, p, rng);
  EXPECT_EQ(more.expanded.size(), 4u);
}

TEST(AddingStageTest, MtLeafModeExpandsParentsOfPickedLeaves) {
  World w(4);
  w.seed_tree();
  StageParams p;
  p.expansion_mode = ExpansionMode::kMtLeaves;
  Rng rng(2);
  const std::size_t mt0 = w.tree.count_at(NodeLevel::kMt);
  const auto report = adding_stage(w.env, p, rng);
  EXPECT_EQ(report.expanded.size(), 2u);
  EXPECT_EQ(w.tree.count_at(NodeLevel::kMt), mt0 + 4 + 4);
  for (const NodeId fe : report.expanded) EXPECT_EQ(w.tree.node(fe).level, NodeLevel::kFe);
}

TEST(AddingStageTest, EnrichesContextAndLogsStage) {
  World w(5);
  w.seed_tree();
  StageParams p;
  Rng rng(3);
  adding_stage(w.env, p, rng);
  EXPECT_EQ(w.ctx.count(ContextTag::kEda), 1u);
  EXPECT_EQ(w.log.records_of(event::kStageStarted).size(), 1u);
  EXPECT_EQ(w.log.records_of(event::kStageFinished).size(), 1u);
  EXPECT_EQ(w.log.records_of(event::kContextAppended).size(), 1u);
  // Every committed mutation is in the journal.
  EXPECT_EQ(apply_journal(w.log.records()), w.tree);
}

TEST(AddingStageTest, SameSeedSameSnapshot) {
  auto run = [] {
    World w(11);
    w.seed_tree();
    StageParams p;
    Rng rng(4);
    for (int i = 0; i < 3; ++i) {
      w.editor.set_iteration(static_cast<std::uint64_t>(i + 1));
      adding_stage(w.env, p, rng);
      MergeMemory mem;
      merging_stage(w.env, mem, p, rng);
    }
    return snapshot(w.tree);
  };
  EXPECT_EQ(run(), run());
}

TEST(AddingStageTest, BudgetStopsBeforeExpansion) {
  World w(6);
  w.seed_tree();
  w.env.budget_exhausted = [] { return true; };
  StageParams p;
  Rng rng(5);
  const std::size_t mt0 = w.tree.count_at(NodeLevel::kMt);
  const auto report = adding_stage(w.env, p, rng);
  EXPECT_TRUE(report.budget_exhausted);
  EXPECT_TRUE(report.expanded.empty());
  EXPECT_EQ(w.tree.count_at(NodeLevel::kMt), mt0 + 4);
  EXPECT_TRUE(w.log.records_of(event::kStageFinished)[0]["budget_exhausted"].get<bool>());
}

class FailingGenerator final : public IdeaGenerator {
 public:
  std::vector<std::string> propose_fe(const ContextState&, std::size_t n,
                                      std::span<const MemoryExcerpt>) override {
    return std::vector<std::string>(n, "fe [0, 0]");
  }
  std::vector<std::string> propose_mt(const Node&, const ContextState&, std::size_t,
                                      std::span<const MemoryExcerpt>) override {
    return {"mt [0, 0]"};  // always one, whatever was asked
  }
  std::string merge_fe(const Node&, const Node&, const ContextState&) override {
    throw std::runtime_error("merge down");
  }
  std::string merge_mt(const Node&, const Node&, const ContextState&) override { return ""; }
  std::optional<std::string> enrich_eda(const IdeationTree&, const ContextState&) override {
    return std::nullopt;
  }
  std::vector<std::string> query_external(const ContextState&, bool) override { return {}; }
};

TEST(AddingStageTest, ShortProposalIsGeneratorFailure) {
  World w(7);
  w.seed_tree();
  FailingGenerator bad;
  StageEnv env{w.editor, w.ctx, bad, w.scorer, w.embedder, w.metric, {}};
  StageParams p;
  Rng rng(1);
  try {
    adding_stage(env, p, rng);
    FAIL() << "expected GeneratorFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneratorFailure);
  }
  // The FE nodes committed before the failure stay, and the tree is valid.
  EXPECT_EQ(w.tree.count_at(NodeLevel::kFe), 4u);
  check_invariants(w.tree);
  MergeMemory mem;
  try {
    merging_stage(env, mem, p, rng);
    FAIL() << "expected GeneratorFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneratorFailure);
    EXPECT_NE(std::string(e.what()).find("merge down"), std::string::npos);
  }
}

// ---- merging ----

TEST(MergingStageTest, SkipsWithFewerThanTwoEligible) {
  World w(8);
  w.seed_tree(1, 2);
  MergeMemory mem;
  StageParams p;
  Rng rng(1);
  const auto report = merging_stage(w.env, mem, p, rng);
  EXPECT_TRUE(report.skipped);
  const auto records = w.log.records();
  ASSERT_GE(records.size(), 3u);
  EXPECT_EQ(records[records.size() - 3]["type"], "StageStarted");
  EXPECT_EQ(records[records.size() - 2]["type"], "SkippedStage");
  EXPECT_EQ(records[records.size() - 1]["type"], "StageFinished");
}

TEST(MergingStageTest, StructureAndCopySemantics) {
  World w(9);
  w.seed_tree(2, 3);
  const IdeationTree before = w.tree;
  MergeMemory mem;
  StageParams p;
  p.n_fe = 1;
  Rng rng(2);
  const auto report = merging_stage(w.env, mem, p, rng);
  ASSERT_EQ(report.attempts.size(), 1u);
  const auto& a = report.attempts[0];
  const Node& merged = w.tree.node(a.merged);
  EXPECT_EQ(merged.provenance, Provenance::merged(a.pair.first(), a.pair.second()));
  // M fresh children plus min(3, 3) resamples from each parent.
  EXPECT_EQ(a.children.size(), 2u + 3u + 3u);
  std::size_t resampled = 0;
  for (const NodeId c : a.children) {
    const Node& n = w.tree.node(c);
    EXPECT_EQ(n.parent, a.merged);
    if (n.provenance.kind == Provenance::Kind::kResampled) {
      ++resampled;
      EXPECT_EQ(n.idea_text, w.tree.node(n.provenance.sources[0]).idea_text);
    }
  }
  EXPECT_EQ(resampled, 6u);
  // Parents' original MT children are untouched.
  for (const auto& [id, node] : before.nodes()) {
    if (node.level != NodeLevel::kMt) continue;
    EXPECT_EQ(w.tree.node(id).raw_score, node.raw_score);
    EXPECT_EQ(w.tree.node(id).parent, node.parent);
    EXPECT_EQ(w.tree.node(id).idea_text, node.idea_text);
  }
  // Memory moved exactly one step.
  if (a.failure) {
    EXPECT_EQ(mem.failure_count(a.pair), 1u);
  } else {
    EXPECT_TRUE(mem.is_excluded(a.pair));
  }
  EXPECT_EQ(w.log.records_of(event::kMergeAttempted).size(), 1u);
  // MT merges in up to two FE nodes with two evaluated children.
  EXPECT_EQ(report.merged_mt.size(), 2u);
  for (const NodeId id : report.merged_mt) {
    const Node& n = w.tree.node(id);
    EXPECT_EQ(n.provenance.kind, Provenance::Kind::kMerged);
    EXPECT_EQ(w.tree.node(n.provenance.sources[0]).parent, n.parent);
  }
  check_invariants(w.tree);
  EXPECT_EQ(apply_journal(w.log.records()), w.tree);
}

// Merged FE children always score far below the parents.
class BadMergeGenerator final : public IdeaGenerator {
 public:
  explicit BadMergeGenerator(IdeaGenerator& inner) : inner_(inner) {}
  std::vector<std::string> propose_fe(const ContextState& c, std::size_t n,
                                      std::span<const MemoryExcerpt> m) override {
    return inner_.propose_fe(c, n, m);
  }
  std::vector<std::string> propose_mt(const Node& fe, const ContextState& c, std::size_t m,
                                      std::span<const MemoryExcerpt> mem) override {
    return inner_.propose_mt(fe, c, m, mem);
  }
  std::string merge_fe(const Node&, const Node&, const ContextState&) override {
    return "fe [100, 100]";
  }
  std::string merge_mt(const Node& a, const Node& b, const ContextState& c) override {
    return inner_.merge_mt(a, b, c);
  }
  std::optional<std::string> enrich_eda(const IdeationTree& t, const ContextState& c) override {
    return inner_.enrich_eda(t, c);
  }
  std::vector<std::string> query_external(const ContextState& c, bool f) override {
    return inner_.query_external(c, f);
  }

 private:
  IdeaGenerator& inner_;
};

TEST(MergingStageTest, RepeatedFailuresPromoteAndExclude) {
  for (std::uint32_t theta = 1; theta <= 3; ++theta) {
    World w(10 + theta);
    w.seed_tree(2, 2);
    const MergePairKey only(w.tree.ids_at(NodeLevel::kFe)[0], w.tree.ids_at(NodeLevel::kFe)[1]);
    BadMergeGenerator bad(w.generator);
    StageEnv env{w.editor, w.ctx, bad, w.scorer, w.embedder, w.metric, {}};
    MergeMemory mem(theta);
    StageParams p;
    p.n_fe = 1;
    Rng rng(theta);
    std::uint32_t attempts_on_pair = 0;
    for (int round = 0; round < 6; ++round) {
      const auto report = merging_stage(env, mem, p, rng);
      for (const auto& a : report.attempts) {
        EXPECT_TRUE(a.failure);
        if (a.pair == only) ++attempts_on_pair;
      }
      // Partition invariant.
      for (const auto& [key, count] : mem.short_term()) {
        EXPECT_FALSE(mem.long_term().contains(key));
        EXPECT_GE(count, 1u);
        EXPECT_LT(count, theta);
      }
    }
    if (attempts_on_pair >= theta) {
      EXPECT_TRUE(mem.is_excluded(only));
      EXPECT_EQ(attempts_on_pair, theta);
    } else {
      EXPECT_EQ(mem.failure_count(only), attempts_on_pair);
    }
    // No long-term pair was attempted after its promotion.
    std::set<std::pair<std::uint64_t, std::uint64_t>> excluded;
    for (const auto& r : w.log.records()) {
      const auto pair = r.contains("pair") ? std::make_pair(r["pair"][0].get<std::uint64_t>(),
                                                           r["pair"][1].get<std::uint64_t>())
                                           : std::make_pair(std::uint64_t{0}, std::uint64_t{0});
      if (r["type"] == "MergeAttempted") EXPECT_FALSE(excluded.contains(pair));
      if (r["type"] == "MemoryPromoted") excluded.insert(pair);
    }
  }
}

TEST(MergeFailureTest, Examples) {
  auto build = [](MetricSpec metric, double a, double b, double m) {
    IdeationTree tree;
    std::vector<NodeId> fes;
    for (double s : {a, b, m}) {
      Node fe;
      fe.level = NodeLevel::kFe;
      fe.idea_text = "fe";
      const NodeId id = tree.add_node(tree.root_id(), fe);
      Node mt;
      mt.level = NodeLevel::kMt;
      mt.idea_text = "mt";
      const NodeId leaf = tree.add_node(id, mt);
      tree.set_evaluated(leaf, s);
      fes.push_back(id);
    }
    return is_merge_failure(tree, fes[2], fes[0], fes[1], metric, 0.0);
  };
  EXPECT_FALSE(build({}, 0.80, 0.75, 0.82));
  EXPECT_TRUE(build({}, 0.80, 0.75, 0.80));
  EXPECT_FALSE(build({"loss", Direction::kLowerBetter}, 0.30, 0.25, 0.20));
  EXPECT_TRUE(build({"loss", Direction::kLowerBetter}, 0.30, 0.25, 0.25));

  IdeationTree tree;
  Node fe;
  fe.level = NodeLevel::kFe;
  const NodeId a = tree.add_node(tree.root_id(), fe);
  const NodeId b = tree.add_node(tree.root_id(), fe);
  const NodeId c = tree.add_node(tree.root_id(), fe);
  try {
    is_merge_failure(tree, c, a, b, MetricSpec{}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEvaluatedChildren);
  }
}

}  // namespace
}  // namespace ideatree
