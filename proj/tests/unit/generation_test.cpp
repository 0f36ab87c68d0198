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

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ideatree/core/error.hpp"
#include "ideatree/core/signature.hpp"
#include "ideatree/generation/checker.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/generation/retrieval.hpp"
#include "ideatree/generation/synthetic.hpp"

namespace ideatree {
namespace {

const std::filesystem::path kCorpus = std::filesystem::path(IDEATREE_FIXTURES_DIR) / "corpus";

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ideatree::Error thrown";
  return ErrorCode::kInvariantViolation;
}

IdeationTree fe_tree(const std::vector<std::string>& texts) {
  IdeationTree tree;
  for (const auto& t : texts) {
    Node n;
    n.level = NodeLevel::kFe;
    n.idea_text = t;
    tree.add_node(tree.root_id(), n);
  }
  return tree;
}

TEST(RetrievalTest, ParsesCorpusAndRanksDeterministically) {
  HashingEmbedder embedder;
  FileCorpusRetriever r(kCorpus, embedder);
  ASSERT_EQ(r.documents().size(), 5u);
  EXPECT_EQ(r.documents()[0].source, DocumentSource::kPapers);
  EXPECT_EQ(r.documents()[0].title, "Target encoding for high-cardinality categorical columns");

  const auto top = r.retrieve("target encoding of categorical columns", 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].key, "01_target_encoding.txt");
  EXPECT_EQ(r.retrieve("target encoding of categorical columns", 2), top);
  EXPECT_EQ(r.retrieve("anything", 10).size(), 5u);
  for (const auto& d : r.retrieve("trees", 10, DocumentSource::kCompetitions)) {
    EXPECT_EQ(d.source, DocumentSource::kCompetitions);
  }
  // A query without tokens scores every document 0, so file order decides.
  const auto tie = r.retrieve("...", 3);
  EXPECT_EQ(tie[0].key, "01_target_encoding.txt");
  EXPECT_EQ(tie[2].key, "03_date_features.txt");
}

TEST(RetrievalTest, Failures) {
  HashingEmbedder embedder;
  EXPECT_EQ(code_of([&] { FileCorpusRetriever("/nonexistent/corpus", embedder); }),
            ErrorCode::kRetrievalFailure);
  EXPECT_EQ(code_of([] { FileCorpusRetriever::parse_document("title: x\n\nbody", "a"); }),
            ErrorCode::kRetrievalFailure);
  EXPECT_EQ(code_of([] { FileCorpusRetriever::parse_document("source: Blogs\ntitle: x\n\n", "a"); }),
            ErrorCode::kRetrievalFailure);
}

TEST(SelectContextNodesTest, OnlyNodeAtLevelGivesEmpty) {
  IdeationTree tree = fe_tree({"alpha"});
  HashingEmbedder e;
  Rng rng(1);
  EXPECT_TRUE(select_context_nodes(tree, make_id(1), ContextStrategy::kNearest, 5, e, rng).empty());
  EXPECT_EQ(code_of([&] {
              select_context_nodes(tree, make_id(9), ContextStrategy::kNearest, 5, e, rng);
            }),
            ErrorCode::kUnknownAnchor);
}

TEST(SelectContextNodesTest, DuplicateTextRanksFirst) {
  IdeationTree tree = fe_tree({"lag features of sales", "one hot encoding", "lag features of sales",
                               "polynomial interactions"});
  HashingEmbedder e;
  Rng rng(1);
  const auto got = select_context_nodes(tree, make_id(1), ContextStrategy::kNearest, 2, e, rng);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0], make_id(3));
}

TEST(SelectContextNodesTest, MatchesExhaustiveSortOracle) {
  const std::vector<std::string> words = {"mean", "target", "lag", "rolling", "ratio", "log",
                                          "bins", "count", "hash", "pca"};
  HashingEmbedder e;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng gen(seed);
    std::vector<std::string> texts;
    for (int i = 0; i < 20; ++i) {
      std::string t;
      for (int w = 0; w < 3; ++w) t += words[gen.below(words.size())] + " ";
      texts.push_back(t);
    }
    IdeationTree tree = fe_tree(texts);
    const NodeId anchor = make_id(1 + gen.below(20));
    // Oracle: all pairwise distances, sorted with an explicit comparator.
    std::vector<std::pair<double, std::uint64_t>> all;
    for (std::uint64_t id = 1; id <= 20; ++id) {
      if (make_id(id) == anchor) continue;
      all.emplace_back(cosine_distance(e.embed(tree.node(anchor).idea_text),
                                       e.embed(tree.node(make_id(id)).idea_text)),
                       id);
    }
    auto near = all;
    std::sort(near.begin(), near.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    auto far = all;
    std::sort(far.begin(), far.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    Rng rng(0);
    const auto n = select_context_nodes(tree, anchor, ContextStrategy::kNearest, 7, e, rng);
    const auto f = select_context_nodes(tree, anchor, ContextStrategy::kFarthest, 7, e, rng);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_EQ(n[i].value, near[i].second) << seed;
      EXPECT_EQ(f[i].value, far[i].second) << seed;
    }
    // Full-size Nearest request is a permutation of every eligible id.
    auto everything = select_context_nodes(tree, anchor, ContextStrategy::kNearest, 100, e, rng);
    std::sort(everything.begin(), everything.end());
    EXPECT_EQ(everything.size(), 19u);
    EXPECT_TRUE(std::adjacent_find(everything.begin(), everything.end()) == everything.end());
    auto random = select_context_nodes(tree, anchor, ContextStrategy::kRandom, 5, e, rng);
    EXPECT_EQ(random.size(), 5u);
    EXPECT_TRUE(std::find(random.begin(), random.end(), anchor) == random.end());
  }
}

class FailingRetriever final : public Retriever {
 public:
  std::vector<Document> retrieve(std::string_view, std::size_t,
                                 std::optional<DocumentSource>) const override {
    throw Error(ErrorCode::kRetrievalFailure, "index offline");
  }
};

TEST(GateExternalQueryTest, Policies) {
  HashingEmbedder e;
  FileCorpusRetriever corpus(kCorpus, e);
  SpaceConfig space;
  space.retrieve_n_competitions = 0;
  SyntheticGenerator gen(space, 1, &corpus);

  ContextState ctx;
  ctx.append(ContextTag::kReader, "predict sales from dates and categories");
  EXPECT_TRUE(gate_external_query(ctx, ExternalPolicy::kNever, gen, 5).empty());
  EXPECT_EQ(ctx.revision(), 1u);

  const auto got = gate_external_query(ctx, ExternalPolicy::kAlways, gen, 5);
  EXPECT_EQ(got.size(), 3u);
  EXPECT_EQ(ctx.count(ContextTag::kExternal), 3u);

  // Adaptive: the synthetic backend skips once external knowledge exists.
  EXPECT_TRUE(gate_external_query(ctx, ExternalPolicy::kAdaptive, gen, 5).empty());

  SyntheticGenerator both(SpaceConfig{}, 1, &corpus);
  ContextState ctx2;
  EXPECT_EQ(gate_external_query(ctx2, ExternalPolicy::kAdaptive, both, 4).size(), 4u);
  EXPECT_EQ(SpaceConfig{}.retrieve_n_papers, 3u);
  EXPECT_EQ(SpaceConfig{}.retrieve_n_competitions, 3u);
}

TEST(GateExternalQueryTest, RetrievalFailureIsLoggedAndEmpty) {
  FailingRetriever broken;
  SyntheticGenerator gen(SpaceConfig{}, 1, &broken);
  ContextState ctx;
  RunLog log;
  EXPECT_TRUE(gate_external_query(ctx, ExternalPolicy::kAlways, gen, 5, &log).empty());
  EXPECT_EQ(log.records_of(event::kExternalQueryFailed).size(), 1u);
  EXPECT_EQ(ctx.revision(), 0u);
}

TEST(CheckerTest, ConjunctionAndReasons) {
  EXPECT_TRUE(check("anything", {}).passed);
  const auto schema = check("id,price\n1,2\n", {schema_check({"id", "target"})});
  EXPECT_FALSE(schema.passed);
  ASSERT_EQ(schema.reasons.size(), 1u);
  EXPECT_NE(schema.reasons[0].find("'target'"), std::string::npos);

  NamedCheck never{"never", [](std::string_view) { return std::optional<std::string>("no"); }};
  const auto two = check("x", {never, schema_check({"y"}), nonblank_check()});
  EXPECT_FALSE(two.passed);
  EXPECT_EQ(two.reasons.size(), 2u);

  NamedCheck crash{"crash", [](std::string_view) -> std::optional<std::string> {
                     throw std::runtime_error("segfault");
                   }};
  EXPECT_EQ(code_of([&] { check("x", {crash}); }), ErrorCode::kCheckerCrash);
  EXPECT_EQ(code_of([&] { check("", {}); }), ErrorCode::kEmptyInput);

  EXPECT_TRUE(check("fe [1, 2]", {idea_vector_check(2)}).passed);
  EXPECT_FALSE(check("fe [1, 2, 3]", {idea_vector_check(2)}).passed);
}

Node vec_node(const std::string& text, NodeLevel level = NodeLevel::kFe) {
  Node n;
  n.level = level;
  n.idea_text = text;
  return n;
}

TEST(SyntheticGeneratorTest, MidpointMerges) {
  SpaceConfig c;
  c.merge_perturbation = 0.0;
  SyntheticGenerator gen(c, 3);
  ContextState ctx;
  EXPECT_EQ(parse_idea_vector(gen.merge_fe(vec_node("fe [0, 0]"), vec_node("fe [2, 2]"), ctx)),
            (IdeaVector{1, 1}));
  EXPECT_EQ(parse_idea_vector(
                gen.merge_mt(vec_node("mt [0.3, -0.7]"), vec_node("mt [0.3, -0.7]"), ctx)),
            (IdeaVector{0.3, -0.7}));
}

TEST(SyntheticGeneratorTest, SameSeedSameSequence) {
  SyntheticGenerator a(SpaceConfig{}, 99), b(SpaceConfig{}, 99), c(SpaceConfig{}, 100);
  ContextState ctx;
  const std::vector<MemoryExcerpt> memory = {
      {make_id(4), NodeLevel::kMt, "mt [0.5, 0.5]", 1.0}};
  const Node fe = vec_node("fe [0, 0]");
  for (int i = 0; i < 5; ++i) {
    const auto x = a.propose_fe(ctx, 3, {});
    EXPECT_EQ(x, b.propose_fe(ctx, 3, {}));
    EXPECT_NE(x, c.propose_fe(ctx, 3, {}));
    EXPECT_EQ(a.propose_mt(fe, ctx, 2, memory), b.propose_mt(fe, ctx, 2, memory));
    c.propose_mt(fe, ctx, 2, memory);
    EXPECT_EQ(a.enrich_eda(IdeationTree{}, ctx), b.enrich_eda(IdeationTree{}, ctx));
    c.enrich_eda(IdeationTree{}, ctx);
  }
  const auto ideas = a.propose_fe(ctx, 4, {});
  ASSERT_EQ(ideas.size(), 4u);
  for (const auto& t : ideas) EXPECT_EQ(parse_idea_vector(t).size(), 2u);
}

TEST(SyntheticGeneratorTest, InvalidSpaceConfig) {
  SpaceConfig c;
  c.dimension = 0;
  EXPECT_EQ(code_of([&] { SyntheticGenerator(c, 1); }), ErrorCode::kInvalidSpaceConfig);
  c = {};
  c.merge_perturbation = -1;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidSpaceConfig);
  EXPECT_EQ(code_of([] { space_config_from_json({{"dimensions", 3}}); }),
            ErrorCode::kInvalidSpaceConfig);
  EXPECT_EQ(space_config_from_json(to_json(SpaceConfig{})).dimension, 2u);
}

TEST(SyntheticCoderTest, BugsRepairAndAvoidance) {
  IdeationTree tree;
  const NodeId fe = tree.add_node(tree.root_id(), vec_node("fe [0, 0]"));
  const NodeId mt = tree.add_node(fe, vec_node("mt [1, 1]", NodeLevel::kMt));
  SyntheticCoderConfig cfg;
  cfg.bug_probability = 1.0;
  SyntheticCoder coder(cfg, 5);
  ContextState ctx;
  std::string code = coder.implement(tree, mt, ctx, {});
  EXPECT_NE(code.find("epochs=50\n"), std::string::npos);
  std::size_t bugs = 0;
  for (auto p = code.find("bug="); p != std::string::npos; p = code.find("bug=", p + 1)) ++bugs;
  EXPECT_EQ(bugs, 6u);
  // Repair is pure and peels off one bug at a time.
  const auto bug = first_bug(code);
  ASSERT_TRUE(bug);
  const std::string fixed = coder.repair(code, bug->first, bug->second);
  EXPECT_EQ(fixed, coder.repair(code, bug->first, bug->second));
  EXPECT_NE(first_bug(fixed), bug);
  std::string c = code;
  for (int i = 0; i < 6; ++i) c = coder.repair(c, "", "");
  EXPECT_FALSE(first_bug(c));

  // Known signatures are never emitted again.
  SyntheticCoder again(cfg, 5);
  std::map<std::uint64_t, std::string> known;
  std::string tmp = code;
  while (auto b = first_bug(tmp)) {
    known[error_signature(b->first, b->second)] = b->first + ": " + b->second;
    tmp = coder.repair(tmp, "", "");
  }
  const std::string avoided = again.implement(tree, mt, ctx, known);
  EXPECT_FALSE(first_bug(avoided));

  // Output per node does not depend on the order nodes are implemented in.
  const NodeId mt2 = tree.add_node(fe, vec_node("mt [2, 2]", NodeLevel::kMt));
  cfg.bug_probability = 0.5;
  SyntheticCoder forward(cfg, 8), backward(cfg, 8);
  const std::string f1 = forward.implement(tree, mt, ctx, {});
  const std::string f2 = forward.implement(tree, mt2, ctx, {});
  const std::string b2 = backward.implement(tree, mt2, ctx, {});
  const std::string b1 = backward.implement(tree, mt, ctx, {});
  EXPECT_EQ(f1, b1);
  EXPECT_EQ(f2, b2);
  // A second call for the same node is a fresh draw.
  EXPECT_NE(forward.implement(tree, mt, ctx, {}), f1);

  SyntheticCoderConfig clean;
  clean.bug_probability = 0.0;
  EXPECT_FALSE(first_bug(SyntheticCoder(clean, 1).implement(tree, mt, ctx, {})));
}

TEST(SignatureTest, NormalizesVolatileParts) {
  EXPECT_EQ(normalize_error_message("index 17 out of   bounds at /tmp/run_3/x.py line 42"),
            "index # out of bounds at <path> line #");
  EXPECT_EQ(error_signature("KeyError", "row 1"), error_signature("KeyError", "row 99"));
  EXPECT_NE(error_signature("KeyError", "row 1"), error_signature("ValueError", "row 1"));
  EXPECT_NE(error_signature("KeyError", "col a"), error_signature("KeyError", "col b"));
}

}  // namespace
}  // namespace ideatree
