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

#include <cmath>
#include <map>

#include "ideatree/core/error.hpp"
#include "ideatree/search/merge_memory.hpp"
#include "ideatree/search/selection.hpp"

namespace ideatree {
namespace {

std::vector<OrientedScore> os(std::initializer_list<double> v) {
  std::vector<OrientedScore> out;
  for (double x : v) out.push_back({x});
  return out;
}

void expect_close(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_LE(std::abs(got[i] - want[i]), 1e-12 * want[i]) << i;
  }
}

TEST(OrientTest, LowerBetterNegates) {
  const std::vector<double> raw{0.3, 0.1};
  const auto o = orient_scores(raw, {"rmse", Direction::kLowerBetter});
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[0].value, -0.3);
  EXPECT_EQ(o[1].value, -0.1);
  const std::vector<double> back{o[0].value, o[1].value};
  const auto twice = orient_scores(back, {"rmse", Direction::kLowerBetter});
  EXPECT_EQ(twice[0].value, 0.3);
  EXPECT_EQ(twice[1].value, 0.1);
  EXPECT_EQ(orient_scores(std::vector<double>{0.5}, {})[0].value, 0.5);
  EXPECT_EQ(unorient(orient(0.7, Direction::kLowerBetter), Direction::kLowerBetter), 0.7);
}

TEST(OrientTest, NonFiniteRejected) {
  const std::vector<double> raw{0.1, NAN};
  EXPECT_THROW(orient_scores(raw, {}), Error);
}

TEST(SoftmaxTest, MatchesHighPrecisionValues) {
  // Reference values computed with 40-digit arithmetic.
  expect_close(softmax(os({0, 0}), 1.0), {0.5, 0.5});
  expect_close(softmax(os({1, 2, 3}), 1.0),
               {0.090030573170380457998, 0.24472847105479765247, 0.66524095577482188953});
  expect_close(softmax(os({0.5, -1.25, 2.0, 0.0}), 0.7),
               {0.099055180788118615293, 0.0081309443786827616195, 0.84432223724246901837,
                0.048491637590729604718});
  expect_close(softmax(os({-3.2, -3.1, -10}), 1.0),
               {0.47476962787475023277, 0.52470158551277134506, 0.00052878661247842217537});
  expect_close(softmax(os({10, 20, 30}), 5.0),
               {0.015876239976466766323, 0.11731042782619836253, 0.86681333219733487114});
}

TEST(SoftmaxTest, NoOverflowAndErrors) {
  const auto p = softmax(os({1000, 0}), 1.0);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_GE(p[1], 0.0);
  EXPECT_LT(p[1], 1e-300);
  EXPECT_THROW(softmax(os({}), 1.0), Error);
  EXPECT_THROW(softmax(os({1}), 0.0), std::invalid_argument);
}

TEST(SoftmaxTest, ShiftInvarianceAndMonotonicity) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<OrientedScore> s;
    const std::size_t n = 2 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) s.push_back({rng.uniform(-3, 3)});
    const double tau = rng.uniform(0.1, 3.0);
    const auto p = softmax(s, tau);
    double total = 0.0;
    for (double x : p) total += x;
    EXPECT_NEAR(total, 1.0, 1e-9);

    auto shifted = s;
    const double c = rng.uniform(-50, 50);
    for (auto& x : shifted) x.value += c;
    const auto q = softmax(shifted, tau);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p[i], q[i], 1e-12);

    auto raised = s;
    const std::size_t j = rng.below(n);
    raised[j].value += rng.uniform(0.0, 2.0);
    EXPECT_GE(softmax(raised, tau)[j], p[j]);
  }
}

IdeationTree tree_with_children(const std::vector<double>& scores, NodeId& fe) {
  IdeationTree tree;
  Node f;
  f.level = NodeLevel::kFe;
  fe = tree.add_node(tree.root_id(), f);
  for (double s : scores) {
    Node m;
    m.status = NodeStatus::kEvaluated;
    m.raw_score = s;
    tree.add_node(fe, m);
  }
  return tree;
}

TEST(SampleTopTest, DegenerateAndOversizedRequests) {
  NodeId fe;
  IdeationTree one = tree_with_children({0.4}, fe);
  Rng rng(1);
  EXPECT_EQ(sample_top(one, fe, 1, {}, 1.0, rng), one.children(fe));

  IdeationTree three = tree_with_children({0.1, 0.2, 0.3}, fe);
  auto all = sample_top(three, fe, 10, {}, 1.0, rng);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, three.children(fe));

  IdeationTree none = tree_with_children({}, fe);
  try {
    sample_top(none, fe, 1, {}, 1.0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEvaluatedChildren);
  }
}

TEST(SampleTopTest, EqualScoresSplitEvenly) {
  NodeId fe;
  IdeationTree tree = tree_with_children({0.5, 0.5}, fe);
  Rng rng(2024);
  std::map<NodeId, int> hits;
  for (int i = 0; i < 10000; ++i) ++hits[sample_top(tree, fe, 1, {}, 1.0, rng)[0]];
  for (const auto& [id, n] : hits) EXPECT_NEAR(n / 10000.0, 0.5, 0.05);
}

TEST(SampleTopTest, ProportionalModeAndLowerBetter) {
  NodeId fe;
  IdeationTree tree = tree_with_children({1.0, 3.0}, fe);
  Rng rng(9);
  int second = 0;
  for (int i = 0; i < 10000; ++i) {
    second += sample_top(tree, fe, 1, {}, 1.0, rng, SampleTopMode::kProportional)[0] ==
              tree.children(fe)[1];
  }
  EXPECT_NEAR(second / 10000.0, 0.75, 0.02);

  // For a loss, the smaller raw value is the likelier draw.
  int first = 0;
  for (int i = 0; i < 10000; ++i) {
    first += sample_top(tree, fe, 1, {"loss", Direction::kLowerBetter}, 1.0, rng)[0] ==
             tree.children(fe)[0];
  }
  EXPECT_NEAR(first / 10000.0, 1.0 / (1.0 + std::exp(-2.0)), 0.02);
}

TEST(MergeMemoryTest, PromotionAndSuccess) {
  const MergePairKey ab(make_id(3), make_id(1));
  EXPECT_EQ(ab, MergePairKey(make_id(1), make_id(3)));
  EXPECT_EQ(ab.first(), make_id(1));
  EXPECT_THROW(MergePairKey(make_id(2), make_id(2)), std::invalid_argument);

  MergeMemory mem(2);
  EXPECT_FALSE(mem.record_failure(ab));
  EXPECT_EQ(mem.failure_count(ab), 1u);
  EXPECT_FALSE(mem.is_excluded(ab));
  EXPECT_TRUE(mem.record_failure(ab));
  EXPECT_TRUE(mem.is_excluded(ab));
  EXPECT_FALSE(mem.short_term().contains(ab));

  const MergePairKey cd(make_id(4), make_id(5));
  mem.record_failure(cd);
  mem.record_success(cd);
  EXPECT_TRUE(mem.is_excluded(cd));
  EXPECT_TRUE(mem.short_term().empty());

  EXPECT_EQ(MergeMemory::from_json(mem.to_json()), mem);
  MergeMemory one(1);
  EXPECT_TRUE(one.record_failure(ab));
}

TEST(MergeMemoryTest, RejectsInconsistentDocuments) {
  auto doc = MergeMemory(2).to_json();
  doc["short_term"] = nlohmann::json::array({{{"pair", {1, 2}}, {"failures", 2}}});
  EXPECT_ANY_THROW(MergeMemory::from_json(doc));
}

}  // namespace
}  // namespace ideatree
